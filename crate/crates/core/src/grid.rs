//! Uniform periodic grids, sampled fields and their exact trigonometric spectra.
//!
//! A field on the box `[0,L_1) x ... x [0,L_n)` is stored as `N_1 x ... x N_n`
//! complex samples, axis 1 varying fastest. Its spectrum holds the amplitudes
//! `c_k` of the trigonometric polynomial `sum_k c_k exp(i 2 pi k.x / L)` that
//! interpolates the samples, for integer frequencies `-N_k/2 <= k_k < N_k/2`
//! stored in FFT order.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape and physical extent of a periodic grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    samples: Vec<usize>,
    periods: Vec<f64>,
}

impl GridSpec {
    pub fn new(samples: Vec<usize>, periods: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidGrid("ndim must be at least 1".into()));
        }
        if samples.len() != periods.len() {
            return Err(Error::InvalidGrid(format!(
                "{} sample counts but {} periods",
                samples.len(),
                periods.len()
            )));
        }
        for (axis, &n) in samples.iter().enumerate() {
            if n < 2 || n % 2 != 0 {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis}: sample count {n} must be even and >= 2"
                )));
            }
        }
        for (axis, &l) in periods.iter().enumerate() {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis}: period {l} must be finite and positive"
                )));
            }
        }
        samples
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .ok_or_else(|| Error::InvalidGrid("total sample count overflows".into()))?;
        Ok(Self { samples, periods })
    }

    /// `ndim` axes of `n` samples each on `[0, 2 pi)`.
    pub fn torus(ndim: usize, n: usize) -> Result<Self> {
        Self::new(vec![n; ndim], vec![2.0 * PI; ndim])
    }

    pub fn ndim(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[usize] {
        &self.samples
    }

    pub fn periods(&self) -> &[f64] {
        &self.periods
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.samples.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight `L_k / N_k` along one axis.
    pub fn spacing(&self, axis: usize) -> f64 {
        self.periods[axis] / self.samples[axis] as f64
    }

    /// Nyquist angular frequency `pi N_k / L_k`.
    pub fn nyquist(&self, axis: usize) -> f64 {
        PI * self.samples[axis] as f64 / self.periods[axis]
    }

    /// Largest admissible integer frequency magnitude on an axis (strictly below Nyquist).
    pub fn max_frequency(&self, axis: usize) -> i64 {
        self.samples[axis] as i64 / 2 - 1
    }

    /// Physical angular frequency `2 pi k / L` for integer frequency `k` on an axis.
    pub fn angular(&self, axis: usize, k: i64) -> f64 {
        2.0 * PI * k as f64 / self.periods[axis]
    }

    /// Integer frequency stored at FFT slot `m` of an axis.
    pub fn slot_frequency(&self, axis: usize, m: usize) -> i64 {
        let n = self.samples[axis];
        if m < n / 2 {
            m as i64
        } else {
            m as i64 - n as i64
        }
    }

    fn frequency_slot(&self, axis: usize, k: i64) -> Result<usize> {
        let limit = self.samples[axis] as i64 / 2;
        if k.abs() >= limit {
            return Err(Error::FrequencyOutOfRange {
                axis,
                frequency: k,
                limit,
            });
        }
        Ok(k.rem_euclid(self.samples[axis] as i64) as usize)
    }

    /// Flat storage index of an integer frequency vector.
    pub fn frequency_index(&self, k: &[i64]) -> Result<usize> {
        if k.len() != self.ndim() {
            return Err(Error::DimensionMismatch {
                expected: self.ndim(),
                got: k.len(),
            });
        }
        let mut index = 0;
        let mut stride = 1;
        for (axis, &kk) in k.iter().enumerate() {
            index += stride * self.frequency_slot(axis, kk)?;
            stride *= self.samples[axis];
        }
        Ok(index)
    }

    /// Per-axis multi-index of a flat storage index.
    pub fn unravel(&self, mut index: usize) -> Vec<usize> {
        self.samples
            .iter()
            .map(|&n| {
                let m = index % n;
                index /= n;
                m
            })
            .collect()
    }

    /// Integer frequency vector stored at a flat spectrum index.
    pub fn frequency_at(&self, index: usize) -> Vec<i64> {
        self.unravel(index)
            .into_iter()
            .enumerate()
            .map(|(axis, m)| self.slot_frequency(axis, m))
            .collect()
    }

    /// Physical frequency vector stored at a flat spectrum index.
    pub fn xi_at(&self, index: usize) -> Vec<f64> {
        self.frequency_at(index)
            .into_iter()
            .enumerate()
            .map(|(axis, k)| self.angular(axis, k))
            .collect()
    }

    /// Physical coordinates of a flat sample index.
    pub fn point_at(&self, index: usize) -> Vec<f64> {
        self.unravel(index)
            .into_iter()
            .enumerate()
            .map(|(axis, m)| m as f64 * self.spacing(axis))
            .collect()
    }
}

/// Complex samples on a periodic grid, with a lazily computed spectrum.
#[derive(Debug, Clone)]
pub struct SampledField {
    spec: GridSpec,
    values: Vec<Complex64>,
    spectrum: OnceLock<Vec<Complex64>>,
}

impl PartialEq for SampledField {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec && self.values == other.values
    }
}

impl SampledField {
    pub fn new(spec: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::DimensionMismatch {
                expected: spec.len(),
                got: values.len(),
            });
        }
        if let Some(index) = values
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            spec,
            values,
            spectrum: OnceLock::new(),
        })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        let len = spec.len();
        Self {
            spec,
            values: vec![Complex64::new(0.0, 0.0); len],
            spectrum: OnceLock::new(),
        }
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(spec: GridSpec, f: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
        let values = (0..spec.len()).map(|i| f(&spec.point_at(i))).collect();
        Self::new(spec, values)
    }

    /// Builds the trigonometric polynomial with the given integer-frequency amplitudes.
    ///
    /// Repeated frequencies accumulate. The spectrum cache is filled from the
    /// input list, so amplitudes are recovered verbatim.
    pub fn from_spectrum(spec: GridSpec, coeffs: &[(Vec<i64>, Complex64)]) -> Result<Self> {
        let mut spectrum = vec![Complex64::new(0.0, 0.0); spec.len()];
        for (k, c) in coeffs {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "non-finite amplitude at frequency {k:?}"
                )));
            }
            spectrum[spec.frequency_index(k)?] += c;
        }
        Ok(Self::from_spectrum_array(spec, spectrum))
    }

    /// Builds a field from a dense spectrum in storage order. Entries are
    /// assumed finite; the Nyquist slots must be zero for the result to be
    /// a faithful trigonometric polynomial.
    pub(crate) fn from_spectrum_array(spec: GridSpec, spectrum: Vec<Complex64>) -> Self {
        let mut values = spectrum.clone();
        transform(&spec, &mut values, Direction::Inverse);
        let cache = OnceLock::new();
        let _ = cache.set(spectrum);
        Self {
            spec,
            values,
            spectrum: cache,
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Amplitudes of the interpolating trigonometric polynomial, in storage order.
    pub fn to_spectrum(&self) -> &[Complex64] {
        self.spectrum.get_or_init(|| {
            let mut data = self.values.clone();
            transform(&self.spec, &mut data, Direction::Forward);
            let scale = 1.0 / self.spec.len() as f64;
            data.iter_mut().for_each(|c| *c *= scale);
            data
        })
    }

    /// Amplitude at an integer frequency.
    pub fn coefficient(&self, k: &[i64]) -> Result<Complex64> {
        Ok(self.to_spectrum()[self.spec.frequency_index(k)?])
    }

    /// Entry-wise `|u(x)|`.
    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        Self {
            spec: self.spec.clone(),
            values: self.values.iter().map(|v| v * alpha).collect(),
            spectrum: OnceLock::new(),
        }
    }

    /// `alpha * self + beta * other` on a common grid.
    pub fn combine(&self, alpha: Complex64, other: &Self, beta: Complex64) -> Result<Self> {
        if self.spec != other.spec {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        Ok(Self {
            spec: self.spec.clone(),
            values,
            spectrum: OnceLock::new(),
        })
    }

    /// Multiplies the spectrum by a real multiplier (storage order) and returns the result.
    pub fn apply_multiplier(&self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.spec.len() {
            return Err(Error::DimensionMismatch {
                expected: self.spec.len(),
                got: weights.len(),
            });
        }
        let spectrum = self
            .to_spectrum()
            .iter()
            .zip(weights)
            .map(|(c, w)| c * w)
            .collect();
        Ok(Self::from_spectrum_array(self.spec.clone(), spectrum))
    }

    /// Indices (storage order) of spectral entries above `threshold * max|c|`.
    pub fn active_modes(&self, threshold: f64) -> Vec<usize> {
        let spectrum = self.to_spectrum();
        let peak = spectrum.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        if peak == 0.0 {
            return Vec::new();
        }
        let cut = threshold * peak;
        spectrum
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > cut)
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Direction {
    Forward,
    Inverse,
}

type PlanCache = Mutex<HashMap<(usize, Direction), Arc<dyn Fft<f64>>>>;

fn plan(len: usize, direction: Direction) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<PlanCache> = OnceLock::new();
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut cache = cache.lock().unwrap_or_else(|e| e.into_inner());
    cache
        .entry((len, direction))
        .or_insert_with(|| {
            let mut planner = PLANNER
                .get_or_init(|| Mutex::new(FftPlanner::new()))
                .lock()
                .unwrap_or_else(|e| e.into_inner());
            match direction {
                Direction::Forward => planner.plan_fft_forward(len),
                Direction::Inverse => planner.plan_fft_inverse(len),
            }
        })
        .clone()
}

/// Unnormalized n-dimensional DFT, applied axis by axis in place.
fn transform(spec: &GridSpec, data: &mut [Complex64], direction: Direction) {
    let total = spec.len();
    let mut stride = 1;
    for &n in spec.samples() {
        let fft = plan(n, direction);
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        if stride == 1 {
            fft.process_with_scratch(data, &mut scratch);
        } else {
            let block = stride * n;
            let mut line = vec![Complex64::new(0.0, 0.0); n];
            for outer in (0..total).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (m, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + m * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (m, value) in line.iter().enumerate() {
                        data[base + m * stride] = *value;
                    }
                }
            }
        }
        stride *= n;
    }
}
