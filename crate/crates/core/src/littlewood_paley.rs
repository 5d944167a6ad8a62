//! Smooth dyadic frequency windows and band decomposition.
//!
//! With a cutoff `psi` equal to 1 on `[0, 1]` and 0 on `[2, inf)`, the
//! low-pass windows are `Psi_j(xi) = psi(2^-j |xi|_a)`, and the bands are
//! `Phi_0 = Psi_0`, `Phi_j = Psi_j - Psi_{j-1}`. Band `j >= 1` lives in the
//! corona `2^{j-1} <= |xi|_a <= 2^{j+1}`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::anisotropy::Anisotropy;
use crate::error::{Error, Result};
use crate::grid::{GridSpec, SampledField};

/// Default relative threshold below which spectral entries count as inactive.
pub const SPECTRAL_THRESHOLD: f64 = 1e-12;

fn bump(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// The radial cutoff `psi`: 1 on `t <= 1`, 0 on `t >= 2`, with the smooth
/// bridge `h(2 - t) / (h(2 - t) + h(t - 1))`, `h(s) = exp(-1/s)`, in between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffProfile {
    pub inner: f64,
    pub outer: f64,
}

impl Default for CutoffProfile {
    fn default() -> Self {
        Self {
            inner: 1.0,
            outer: 2.0,
        }
    }
}

pub fn make_cutoff() -> CutoffProfile {
    CutoffProfile::default()
}

impl CutoffProfile {
    pub fn eval(&self, t: f64) -> f64 {
        if t <= self.inner {
            return 1.0;
        }
        if t >= self.outer {
            return 0.0;
        }
        let width = self.outer - self.inner;
        let up = bump((self.outer - t) / width);
        let down = bump((t - self.inner) / width);
        up / (up + down)
    }
}

/// Window stack `Phi_0, ..., Phi_jmax` sampled on a grid's frequency lattice.
#[derive(Debug, Clone)]
pub struct LPFamily {
    spec: GridSpec,
    profile: CutoffProfile,
    aniso: Anisotropy,
    jmax: usize,
    distances: Vec<f64>,
    windows: Vec<Vec<f64>>,
}

/// Largest `jmax` whose top corona stays strictly below Nyquist on every axis,
/// i.e. `2^{a_k (jmax + 1)} < pi N_k / L_k`. `None` if even `jmax = 0` fails.
pub fn max_admissible_level(spec: &GridSpec, aniso: &Anisotropy) -> Option<usize> {
    (0..64usize)
        .take_while(|&j| check_level(spec, aniso, j).is_ok())
        .last()
}

fn check_level(spec: &GridSpec, aniso: &Anisotropy, jmax: usize) -> Result<()> {
    let top = (jmax + 1) as f64;
    let mut total = 0.0;
    for (axis, &a) in aniso.weights().iter().enumerate() {
        let reach = 2f64.powf(a * top);
        total += reach;
        let nyquist = spec.nyquist(axis);
        if !(reach < nyquist) || !total.is_finite() {
            return Err(Error::LevelTooLarge {
                jmax,
                axis,
                reach,
                nyquist,
            });
        }
    }
    Ok(())
}

pub fn build_family(spec: &GridSpec, aniso: &Anisotropy, jmax: usize) -> Result<LPFamily> {
    LPFamily::new(spec, aniso, jmax)
}

impl LPFamily {
    pub fn new(spec: &GridSpec, aniso: &Anisotropy, jmax: usize) -> Result<Self> {
        if aniso.ndim() != spec.ndim() {
            return Err(Error::DimensionMismatch {
                expected: spec.ndim(),
                got: aniso.ndim(),
            });
        }
        check_level(spec, aniso, jmax)?;
        let profile = make_cutoff();
        let distances: Vec<f64> = (0..spec.len())
            .into_par_iter()
            .map(|i| aniso.distance_unchecked(&spec.xi_at(i)))
            .collect();
        let low_pass = |j: usize| -> Vec<f64> {
            let scale = 0.5f64.powi(j as i32);
            distances.iter().map(|d| profile.eval(d * scale)).collect()
        };
        let mut windows = Vec::with_capacity(jmax + 1);
        let mut previous = low_pass(0);
        windows.push(previous.clone());
        for j in 1..=jmax {
            let current = low_pass(j);
            windows.push(current.iter().zip(&previous).map(|(a, b)| a - b).collect());
            previous = current;
        }
        Ok(Self {
            spec: spec.clone(),
            profile,
            aniso: aniso.clone(),
            jmax,
            distances,
            windows,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn profile(&self) -> &CutoffProfile {
        &self.profile
    }

    pub fn aniso(&self) -> &Anisotropy {
        &self.aniso
    }

    pub fn jmax(&self) -> usize {
        self.jmax
    }

    /// `Phi_j` on the lattice, storage order.
    pub fn window(&self, j: usize) -> &[f64] {
        &self.windows[j]
    }

    pub fn windows(&self) -> &[Vec<f64>] {
        &self.windows
    }

    /// `|xi|_a` at every lattice point, storage order.
    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    /// Largest `|xi|_a` a field may carry and still be split losslessly.
    pub fn admissible_radius(&self) -> f64 {
        if self.jmax == 0 {
            0.5
        } else {
            2f64.powi(self.jmax as i32 - 1)
        }
    }

    /// Largest `|xi|_a` over the field's active modes.
    pub fn spectral_radius(&self, field: &SampledField, threshold: f64) -> f64 {
        field
            .active_modes(threshold)
            .into_iter()
            .map(|i| self.distances[i])
            .fold(0.0, f64::max)
    }

    /// Band pieces `u_j = F^-1(Phi_j F u)` for `j = 0..=jmax`.
    pub fn decompose(&self, field: &SampledField) -> Result<Vec<SampledField>> {
        if field.spec() != &self.spec {
            return Err(Error::GridMismatch);
        }
        let largest = self.spectral_radius(field, SPECTRAL_THRESHOLD);
        let limit = self.admissible_radius();
        if largest > limit * (1.0 + 1e-12) {
            return Err(Error::NotBandLimited { largest, limit });
        }
        self.windows
            .iter()
            .map(|w| field.apply_multiplier(w))
            .collect()
    }
}

pub fn decompose(field: &SampledField, family: &LPFamily) -> Result<Vec<SampledField>> {
    family.decompose(field)
}

/// Half-widths of the smallest axis-aligned rectangle containing the active spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralRectangle {
    pub half_widths: Vec<f64>,
    /// The field had no active modes.
    pub empty: bool,
}

pub fn spectral_rectangle(field: &SampledField, threshold: f64) -> Result<SpectralRectangle> {
    if !(0.0..1.0).contains(&threshold) {
        return Err(Error::InvalidParameter(format!(
            "threshold {threshold} must lie in [0, 1)"
        )));
    }
    let spec = field.spec();
    let active = field.active_modes(threshold);
    let mut half_widths = vec![0.0; spec.ndim()];
    for &i in &active {
        for (axis, k) in spec.frequency_at(i).into_iter().enumerate() {
            half_widths[axis] = f64::max(half_widths[axis], spec.angular(axis, k).abs());
        }
    }
    Ok(SpectralRectangle {
        half_widths,
        empty: active.is_empty(),
    })
}

/// Whether `supp F f_j` lies in `prod [-A R_k^j, A R_k^j]` for every `j`.
pub fn check_rectangle_condition(fields: &[SampledField], rbase: &[f64], a: f64) -> Result<bool> {
    if let Some(k) = rbase.iter().position(|&r| !(r > 1.0)) {
        return Err(Error::InvalidParameter(format!(
            "rectangle base R_{} = {} must be > 1",
            k + 1,
            rbase[k]
        )));
    }
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(format!("A = {a} must be > 0")));
    }
    for (j, f) in fields.iter().enumerate() {
        if f.spec().ndim() != rbase.len() {
            return Err(Error::DimensionMismatch {
                expected: rbase.len(),
                got: f.spec().ndim(),
            });
        }
        let rect = spectral_rectangle(f, SPECTRAL_THRESHOLD)?;
        for (r, base) in rect.half_widths.iter().zip(rbase) {
            let bound = a * base.powi(j as i32);
            if *r > bound * (1.0 + 1e-12) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
