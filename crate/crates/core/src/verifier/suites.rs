//! Ensemble drivers: one function per inequality family, each producing a
//! [`VerificationReport`].

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ensemble::{complex_gaussian, generate, generate_bands, trial_rng, EnsembleKind, EnsembleSpec, DEFAULT_BUMP_WIDTH};
use super::ratios::{mixed_npp_ratio, npp_ratio, seq_npp_ratio, sobolev_ratio_bands, spectral_ball_radius, RatioTrial, SobolevParams};
use super::report::{least_squares, SweepPoint, SweepSummary, VerificationReport};
use crate::anisotropy::Anisotropy;
use crate::error::{Error, Result};
use crate::grid::{GridSpec, SampledField};
use crate::littlewood_paley::{spectral_rectangle, SPECTRAL_THRESHOLD};
use crate::mixed_norm::{binary_sequence_sup, interpolation_ratio, lp_norm, power_subadditivity_check, InterpolationParams, MixedExponents};

/// Slope tolerance for scaling sweeps.
pub const SLOPE_TOLERANCE: f64 = 0.15;

/// Rectangle-supported ensemble families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    RandomRect,
    Dirichlet,
    GaussianBump,
}

impl FieldKind {
    pub fn ensemble(self, rect: Vec<f64>) -> EnsembleKind {
        match self {
            FieldKind::RandomRect => EnsembleKind::RandomRect { rect },
            FieldKind::Dirichlet => EnsembleKind::Dirichlet { rect },
            FieldKind::GaussianBump => EnsembleKind::GaussianBump {
                rect,
                width: DEFAULT_BUMP_WIDTH,
            },
        }
    }

    /// Deterministic kinds need one trial only.
    fn trial_count(self, trials: usize) -> usize {
        match self {
            FieldKind::RandomRect => trials,
            _ => trials.min(1),
        }
    }
}

fn fmt_exp(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{p}")
    }
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|x| fmt_exp(*x)).collect::<Vec<_>>().join(",")
}

fn grid_config(grid: &GridSpec) -> BTreeMap<String, String> {
    let mut c = BTreeMap::new();
    c.insert(
        "samples".into(),
        grid.samples().iter().map(|n| n.to_string()).collect::<Vec<_>>().join(","),
    );
    c.insert("periods".into(), fmt_vec(grid.periods()));
    c
}

fn numbered(trials: Vec<RatioTrial>) -> Vec<RatioTrial> {
    trials.into_iter().enumerate().map(|(i, t)| t.with_trial(i)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NppSuite {
    pub grid: GridSpec,
    pub p: f64,
    pub r: f64,
    /// Ball radius; the ensemble fills the inscribed cube `|xi_k| <= R / sqrt(n)`.
    pub radius: f64,
    pub kind: FieldKind,
    pub trials: usize,
    pub seed: u64,
}

impl NppSuite {
    pub fn run(&self) -> Result<VerificationReport> {
        let n = self.grid.ndim();
        let half = self.radius / (n as f64).sqrt();
        let fields = generate(&EnsembleSpec {
            grid: self.grid.clone(),
            kind: self.kind.ensemble(vec![half; n]),
            count: self.kind.trial_count(self.trials),
            seed: self.seed,
        })?;
        let trials = fields
            .par_iter()
            .map(|f| {
                let measured = spectral_ball_radius(f);
                let radius = if measured > 0.0 { measured } else { self.radius };
                npp_ratio(f, self.p, self.r, radius)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut config = grid_config(&self.grid);
        config.insert("p".into(), fmt_exp(self.p));
        config.insert("r".into(), fmt_exp(self.r));
        config.insert("R".into(), fmt_exp(self.radius));
        config.insert("kind".into(), format!("{:?}", self.kind));
        config.insert("seed".into(), self.seed.to_string());
        Ok(VerificationReport::new("npp", config, numbered(trials)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedNppSuite {
    pub grid: GridSpec,
    pub p: MixedExponents,
    pub r: MixedExponents,
    pub rect: Vec<f64>,
    pub kind: FieldKind,
    pub trials: usize,
    pub seed: u64,
}

impl MixedNppSuite {
    pub fn run(&self) -> Result<VerificationReport> {
        let fields = generate(&EnsembleSpec {
            grid: self.grid.clone(),
            kind: self.kind.ensemble(self.rect.clone()),
            count: self.kind.trial_count(self.trials),
            seed: self.seed,
        })?;
        let trials = fields
            .par_iter()
            .map(|f| {
                let measured = spectral_rectangle(f, SPECTRAL_THRESHOLD)?;
                let rect: Vec<f64> = measured
                    .half_widths
                    .iter()
                    .zip(&self.rect)
                    .map(|(&m, &d)| if m > 0.0 { m } else { d })
                    .collect();
                mixed_npp_ratio(f, &self.p, &self.r, &rect)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut config = grid_config(&self.grid);
        config.insert("p".into(), fmt_vec(self.p.as_slice()));
        config.insert("r".into(), fmt_vec(self.r.as_slice()));
        config.insert("R".into(), fmt_vec(&self.rect));
        config.insert("kind".into(), format!("{:?}", self.kind));
        config.insert("seed".into(), self.seed.to_string());
        Ok(VerificationReport::new("mixed-npp", config, numbered(trials)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeqNppSuite {
    pub grid: GridSpec,
    pub aniso: Anisotropy,
    pub jmax: usize,
    pub p: MixedExponents,
    pub r: MixedExponents,
    pub q: f64,
    pub trials: usize,
    pub seed: u64,
}

impl SeqNppSuite {
    /// Rectangle geometry of Littlewood-Paley bands: `R_k = 2^{a_k}`, `A = 2^{max a_k}`.
    pub fn rectangle_geometry(aniso: &Anisotropy) -> (Vec<f64>, f64) {
        let rbase = aniso.weights().iter().map(|a| 2f64.powf(*a)).collect();
        (rbase, 2f64.powf(aniso.max_weight()))
    }

    pub fn run(&self) -> Result<VerificationReport> {
        let sequences = generate_bands(&EnsembleSpec {
            grid: self.grid.clone(),
            kind: EnsembleKind::LpBands {
                aniso: self.aniso.clone(),
                jmax: self.jmax,
            },
            count: self.trials,
            seed: self.seed,
        })?;
        let (rbase, a) = Self::rectangle_geometry(&self.aniso);
        let trials = sequences
            .par_iter()
            .map(|fs| seq_npp_ratio(fs, &self.p, &self.r, &rbase, a, self.q))
            .collect::<Result<Vec<_>>>()?;
        let mut config = grid_config(&self.grid);
        config.insert("aniso".into(), fmt_vec(self.aniso.weights()));
        config.insert("jmax".into(), self.jmax.to_string());
        config.insert("p".into(), fmt_vec(self.p.as_slice()));
        config.insert("r".into(), fmt_vec(self.r.as_slice()));
        config.insert("q".into(), fmt_exp(self.q));
        config.insert("seed".into(), self.seed.to_string());
        Ok(VerificationReport::new("seq-npp", config, numbered(trials)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolevSuite {
    pub grid: GridSpec,
    pub aniso: Anisotropy,
    /// Fields fill `|xi|_a <= 2^{jmax-1}`.
    pub jmax: usize,
    pub params: SobolevParams,
    pub trials: usize,
    pub seed: u64,
}

impl SobolevSuite {
    pub fn run(&self) -> Result<VerificationReport> {
        self.params.validate(&self.aniso)?;
        let sequences = generate_bands(&EnsembleSpec {
            grid: self.grid.clone(),
            kind: EnsembleKind::LpBands {
                aniso: self.aniso.clone(),
                jmax: self.jmax,
            },
            count: self.trials,
            seed: self.seed,
        })?;
        let trials = sequences
            .par_iter()
            .map(|bands| sobolev_ratio_bands(bands, &self.aniso, &self.params))
            .collect::<Result<Vec<_>>>()?;
        let mut config = grid_config(&self.grid);
        config.insert("aniso".into(), fmt_vec(self.aniso.weights()));
        config.insert("jmax".into(), self.jmax.to_string());
        config.insert("s".into(), fmt_exp(self.params.s));
        config.insert("t".into(), fmt_exp(self.params.t));
        config.insert("p".into(), fmt_vec(self.params.p.as_slice()));
        config.insert("r".into(), fmt_vec(self.params.r.as_slice()));
        config.insert("q".into(), fmt_exp(self.params.q));
        config.insert("target".into(), format!("{:?}", self.params.target));
        config.insert("seed".into(), self.seed.to_string());
        Ok(VerificationReport::new("sobolev", config, numbered(trials)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubaddSuite {
    pub grid: GridSpec,
    pub rect: Vec<f64>,
    pub p: MixedExponents,
    pub trials: usize,
    pub seed: u64,
}

impl SubaddSuite {
    /// Each trial draws an independent pair; the ratio column holds `lhs / rhs`.
    pub fn run(&self) -> Result<VerificationReport> {
        let spec = EnsembleSpec {
            grid: self.grid.clone(),
            kind: EnsembleKind::RandomRect { rect: self.rect.clone() },
            count: 2 * self.trials,
            seed: self.seed,
        };
        let fields = generate(&spec)?;
        let outcomes = fields
            .par_chunks_exact(2)
            .map(|pair| power_subadditivity_check(&pair[0], &pair[1], &self.p))
            .collect::<Result<Vec<_>>>()?;
        let violations = outcomes.iter().filter(|o| !o.holds).count();
        let trials = outcomes.iter().map(|o| RatioTrial::new(o.lhs, 1.0, o.rhs)).collect();
        let mut config = grid_config(&self.grid);
        config.insert("p".into(), fmt_vec(self.p.as_slice()));
        config.insert("R".into(), fmt_vec(&self.rect));
        config.insert("seed".into(), self.seed.to_string());
        Ok(VerificationReport::new("subadd", config, numbered(trials)).with_check(
            "lambda-subadditivity",
            violations == 0,
            format!("{violations} violations in {} pairs", self.trials),
        ))
    }
}

/// Interpolation-lemma checks: exactness on single-term sequences over a
/// parameter sweep, random sequences, and an exhaustive 0/1 search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Suite {
    /// Number of random parameter points for the single-term check.
    pub sweep_points: usize,
    /// Random sequences per trial batch.
    pub trials: usize,
    pub search: InterpolationParams,
    pub search_len: usize,
    pub seed: u64,
}

impl Default for Lemma1Suite {
    fn default() -> Self {
        Self {
            sweep_points: 200,
            trials: 100,
            search: InterpolationParams {
                s0: 1.0,
                s1: -1.0,
                theta: 0.5,
                q: 1.0,
                base: 2.0,
            },
            search_len: 12,
            seed: 0,
        }
    }
}

/// Random admissible `(s0, s1, theta, q, base)`.
pub fn random_interpolation_params(rng: &mut impl Rng) -> InterpolationParams {
    let s1 = rng.random_range(-3.0..2.0);
    let s0 = s1 + rng.random_range(0.05..3.0);
    let theta = rng.random_range(0.01..0.99);
    let q = match rng.random_range(0..5) {
        0 => f64::INFINITY,
        1 => 1.0,
        2 => 2.0,
        _ => rng.random_range(0.2..4.0),
    };
    let base = rng.random_range(1.1..8.0);
    InterpolationParams { s0, s1, theta, q, base }
}

impl Lemma1Suite {
    /// Largest `|ratio - 1|` over single-term sequences at random parameter points.
    pub fn single_term_deviation(&self) -> Result<f64> {
        (0..self.sweep_points)
            .map(|i| {
                let mut rng = trial_rng(self.seed, i as u64);
                let params = random_interpolation_params(&mut rng);
                let len = rng.random_range(1..16usize);
                let m = rng.random_range(0..len);
                let mut seq = vec![Complex64::new(0.0, 0.0); len];
                seq[m] = complex_gaussian(&mut rng) + Complex64::new(1e-3, 0.0);
                Ok((interpolation_ratio(&seq, &params)?.ratio - 1.0).abs())
            })
            .try_fold(0.0f64, |m, d: Result<f64>| Ok(m.max(d?)))
    }

    pub fn run(&self) -> Result<VerificationReport> {
        let deviation = self.single_term_deviation()?;
        let trials = (0..self.trials)
            .into_par_iter()
            .map(|i| {
                let mut rng = trial_rng(self.seed ^ 0x5EED, i as u64);
                let len = rng.random_range(1..24usize);
                let seq: Vec<Complex64> = (0..len).map(|_| complex_gaussian(&mut rng)).collect();
                let r = interpolation_ratio(&seq, &self.search)?;
                Ok(RatioTrial::new(r.lhs, 1.0, r.rhs))
            })
            .collect::<Result<Vec<_>>>()?;
        let (sup, pattern) = binary_sequence_sup(self.search_len, &self.search, self.seed)?;
        let mut config = BTreeMap::new();
        config.insert("s0".into(), fmt_exp(self.search.s0));
        config.insert("s1".into(), fmt_exp(self.search.s1));
        config.insert("theta".into(), fmt_exp(self.search.theta));
        config.insert("q".into(), fmt_exp(self.search.q));
        config.insert("base".into(), fmt_exp(self.search.base));
        config.insert("search_len".into(), self.search_len.to_string());
        config.insert("seed".into(), self.seed.to_string());
        let pattern: String = pattern.iter().map(|b| char::from(b'0' + b)).collect();
        Ok(VerificationReport::new("lemma1", config, numbered(trials))
            .with_check(
                "single-term-exact",
                deviation <= 1e-12,
                format!("max |ratio - 1| = {deviation:e} over {} points", self.sweep_points),
            )
            .with_check(
                "binary-search",
                sup.is_finite(),
                format!("0/1 sup = {sup} attained by {pattern}"),
            ))
    }
}

/// `||f||_r / ||f||_p` maximized over an ensemble at each radius, with a log-log fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSuite {
    pub ndim: usize,
    pub samples: usize,
    pub p: f64,
    pub r: f64,
    pub radii: Vec<f64>,
    pub kinds: Vec<FieldKind>,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl SweepSuite {
    pub fn predicted_slope(&self) -> f64 {
        let n = self.ndim as f64;
        n / self.p - n / self.r
    }

    pub fn run(&self) -> Result<VerificationReport> {
        if self.radii.len() < 3 {
            return Err(Error::InvalidParameter(format!(
                "scaling sweep needs at least 3 radii, got {}",
                self.radii.len()
            )));
        }
        if !(self.p > 0.0 && self.p <= self.r) {
            return Err(Error::ExponentOrder {
                axis: 0,
                p: self.p,
                r: self.r,
            });
        }
        if self.kinds.is_empty() {
            return Err(Error::Empty("ensemble kinds"));
        }
        let grid = GridSpec::new(vec![self.samples; self.ndim], vec![2.0 * PI; self.ndim])?;
        let mut points = Vec::with_capacity(self.radii.len());
        for (level, &radius) in self.radii.iter().enumerate() {
            let mut fields: Vec<SampledField> = Vec::new();
            for (slot, kind) in self.kinds.iter().enumerate() {
                fields.extend(generate(&EnsembleSpec {
                    grid: grid.clone(),
                    kind: kind.ensemble(vec![radius; self.ndim]),
                    count: kind.trial_count(self.trials),
                    seed: self.seed ^ ((level as u64) << 32) ^ (slot as u64) << 48,
                })?);
            }
            let trials = fields
                .par_iter()
                .map(|f| Ok(RatioTrial::new(lp_norm(f, self.r)?, 1.0, lp_norm(f, self.p)?)))
                .collect::<Result<Vec<_>>>()?;
            let trials = numbered(trials);
            let (c_emp, _) = super::report::empirical_constant(&trials);
            points.push(SweepPoint { radius, c_emp, trials });
        }
        let xs: Vec<f64> = points.iter().map(|pt| pt.radius.log2()).collect();
        let ys: Vec<f64> = points.iter().map(|pt| pt.c_emp.log2()).collect();
        let fit = least_squares(&xs, &ys)
            .ok_or_else(|| Error::InvalidParameter("radii must not all coincide".into()))?;
        let all: Vec<RatioTrial> = points.iter().flat_map(|pt| pt.trials.iter().copied()).collect();
        let mut config = BTreeMap::new();
        config.insert("n".into(), self.ndim.to_string());
        config.insert("samples".into(), self.samples.to_string());
        config.insert("p".into(), fmt_exp(self.p));
        config.insert("r".into(), fmt_exp(self.r));
        config.insert("radii".into(), fmt_vec(&self.radii));
        config.insert(
            "kinds".into(),
            self.kinds.iter().map(|k| format!("{k:?}")).collect::<Vec<_>>().join(","),
        );
        config.insert("seed".into(), self.seed.to_string());
        let mut report = VerificationReport::new("sweep", config, all);
        report = report.with_sweep(SweepSummary {
            points,
            fit,
            predicted_slope: self.predicted_slope(),
            tolerance: self.tolerance,
        });
        Ok(report)
    }
}
