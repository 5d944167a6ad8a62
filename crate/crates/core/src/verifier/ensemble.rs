//! Seeded test-function ensembles.
//!
//! Each trial draws from its own ChaCha stream keyed by `(seed, trial)`, so
//! serial and parallel generation give bit-identical fields.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::anisotropy::Anisotropy;
use crate::error::{Error, Result};
use crate::grid::{GridSpec, SampledField};
use crate::littlewood_paley::LPFamily;

/// Default Gaussian-bump width as a fraction of the rectangle half-width.
pub const DEFAULT_BUMP_WIDTH: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EnsembleKind {
    /// Complex Gaussian amplitudes on every lattice mode with `|xi_k| <= rect_k`.
    RandomRect { rect: Vec<f64> },
    /// Amplitude 1 on every lattice mode inside the rectangle.
    Dirichlet { rect: Vec<f64> },
    /// Amplitudes `exp(-sum (xi_k / (width rect_k))^2 / 2)` inside the rectangle.
    GaussianBump { rect: Vec<f64>, width: f64 },
    /// Random fields on `|xi|_a <= 2^{jmax-1}`, split into Littlewood-Paley bands.
    LpBands { aniso: Anisotropy, jmax: usize },
}

impl EnsembleKind {
    pub fn name(&self) -> &'static str {
        match self {
            EnsembleKind::RandomRect { .. } => "random-rect",
            EnsembleKind::Dirichlet { .. } => "dirichlet",
            EnsembleKind::GaussianBump { .. } => "gaussian-bump",
            EnsembleKind::LpBands { .. } => "lp-bands",
        }
    }

    pub fn is_random(&self) -> bool {
        matches!(self, EnsembleKind::RandomRect { .. } | EnsembleKind::LpBands { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub grid: GridSpec,
    pub kind: EnsembleKind,
    pub count: usize,
    pub seed: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent RNG stream for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(trial)))
}

pub fn complex_gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Integer frequency vectors of the lattice modes selected by `keep(xi)`.
fn lattice_modes(grid: &GridSpec, keep: impl Fn(&[f64]) -> bool) -> Vec<Vec<i64>> {
    (0..grid.len())
        .filter(|&i| keep(&grid.xi_at(i)))
        .map(|i| grid.frequency_at(i))
        .collect()
}

fn check_rect(grid: &GridSpec, rect: &[f64]) -> Result<()> {
    if rect.len() != grid.ndim() {
        return Err(Error::DimensionMismatch {
            expected: grid.ndim(),
            got: rect.len(),
        });
    }
    for (axis, &r) in rect.iter().enumerate() {
        if !(r >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "rectangle half-width on axis {axis} is {r}"
            )));
        }
        let nyquist = grid.nyquist(axis);
        if r >= nyquist {
            return Err(Error::SupportViolation {
                axis,
                measured: r,
                declared: nyquist,
            });
        }
    }
    Ok(())
}

fn in_rect(rect: &[f64]) -> impl Fn(&[f64]) -> bool + '_ {
    move |xi: &[f64]| xi.iter().zip(rect).all(|(x, r)| x.abs() <= r * (1.0 + 1e-12))
}

/// Fields of a band-limited ensemble.
///
/// For [`EnsembleKind::LpBands`] this returns the undecomposed parent fields;
/// use [`generate_bands`] for the band sequences.
pub fn generate(spec: &EnsembleSpec) -> Result<Vec<SampledField>> {
    let grid = &spec.grid;
    let modes = match &spec.kind {
        EnsembleKind::RandomRect { rect }
        | EnsembleKind::Dirichlet { rect }
        | EnsembleKind::GaussianBump { rect, .. } => {
            check_rect(grid, rect)?;
            lattice_modes(grid, in_rect(rect))
        }
        EnsembleKind::LpBands { aniso, jmax } => {
            let family = LPFamily::new(grid, aniso, *jmax)?;
            let radius = family.admissible_radius();
            (0..grid.len())
                .filter(|&i| family.distances()[i] <= radius)
                .map(|i| grid.frequency_at(i))
                .collect()
        }
    };
    let amplitudes: Vec<Complex64> = match &spec.kind {
        EnsembleKind::Dirichlet { .. } => vec![Complex64::new(1.0, 0.0); modes.len()],
        EnsembleKind::GaussianBump { rect, width } => {
            if !(*width > 0.0) {
                return Err(Error::InvalidParameter(format!("bump width {width} must be > 0")));
            }
            modes
                .iter()
                .map(|k| {
                    let e: f64 = k
                        .iter()
                        .enumerate()
                        .filter(|(axis, _)| rect[*axis] > 0.0)
                        .map(|(axis, &kk)| (grid.angular(axis, kk) / (width * rect[axis])).powi(2))
                        .sum();
                    Complex64::new((-0.5 * e).exp(), 0.0)
                })
                .collect()
        }
        _ => Vec::new(),
    };
    (0..spec.count)
        .into_par_iter()
        .map(|trial| {
            let coeffs: Vec<(Vec<i64>, Complex64)> = if spec.kind.is_random() {
                let mut rng = trial_rng(spec.seed, trial as u64);
                modes.iter().map(|k| (k.clone(), complex_gaussian(&mut rng))).collect()
            } else {
                modes.iter().cloned().zip(amplitudes.iter().copied()).collect()
            };
            SampledField::from_spectrum(grid.clone(), &coeffs)
        })
        .collect()
}

/// Littlewood-Paley band sequences of an [`EnsembleKind::LpBands`] ensemble.
pub fn generate_bands(spec: &EnsembleSpec) -> Result<Vec<Vec<SampledField>>> {
    let EnsembleKind::LpBands { aniso, jmax } = &spec.kind else {
        return Err(Error::InvalidParameter(format!(
            "generate_bands needs an lp-bands ensemble, got {}",
            spec.kind.name()
        )));
    };
    let family = LPFamily::new(&spec.grid, aniso, *jmax)?;
    generate(spec)?
        .par_iter()
        .map(|u| family.decompose(u))
        .collect()
}
