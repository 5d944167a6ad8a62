//! Mixed Lebesgue quasi-norms, weighted sequence quasi-norms and the
//! two-endpoint interpolation inequality for `l^s_q`.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, SampledField};

/// Per-axis integrability exponents `(p_1, ..., p_n)`, each in `(0, inf]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedExponents(Vec<f64>);

impl MixedExponents {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::Empty("exponent vector"));
        }
        for (axis, &v) in p.iter().enumerate() {
            if v.is_nan() || v <= 0.0 {
                return Err(Error::InvalidExponent { axis, value: v });
            }
        }
        Ok(Self(p))
    }

    /// `(p, ..., p)` with `n` entries.
    pub fn uniform(n: usize, p: f64) -> Result<Self> {
        Self::new(vec![p; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|p| p.is_finite())
    }

    /// `min(1, p_1, ..., p_n)`: the power at which the quasi-norm is subadditive.
    pub fn subadditivity_power(&self) -> f64 {
        self.0.iter().fold(1.0f64, |m, &p| m.min(p))
    }

    pub fn min(&self) -> f64 {
        self.0.iter().fold(f64::INFINITY, |m, &p| m.min(p))
    }

    pub fn max(&self) -> f64 {
        self.0.iter().fold(0.0f64, |m, &p| m.max(p))
    }

    /// Copy with axis `axis` replaced by `p`.
    pub fn with_axis(&self, axis: usize, p: f64) -> Result<Self> {
        let mut v = self.0.clone();
        v[axis] = p;
        Self::new(v)
    }
}

/// `(h * sum |v|^p)^(1/p)`, or `max |v|` for `p = inf`, scaled against overflow.
fn reduce_line(line: &[f64], p: f64, h: f64) -> f64 {
    let peak = line.iter().fold(0.0f64, |m, &v| m.max(v));
    if peak == 0.0 || p.is_infinite() {
        return peak;
    }
    let sum: f64 = line.iter().map(|&v| (v / peak).powf(p)).sum();
    peak * (h * sum).powf(1.0 / p)
}

/// Mixed quasi-norm of nonnegative samples: the `p_1` mean over `x_1` is
/// taken first, the `p_n` mean over `x_n` last.
pub fn mixed_norm_of_magnitudes(spec: &GridSpec, magnitudes: &[f64], p: &MixedExponents) -> Result<f64> {
    if p.len() != spec.ndim() {
        return Err(Error::DimensionMismatch {
            expected: spec.ndim(),
            got: p.len(),
        });
    }
    if magnitudes.len() != spec.len() {
        return Err(Error::DimensionMismatch {
            expected: spec.len(),
            got: magnitudes.len(),
        });
    }
    let mut current: Vec<f64> = magnitudes.to_vec();
    for (axis, &pk) in p.as_slice().iter().enumerate() {
        let n = spec.samples()[axis];
        let h = spec.spacing(axis);
        current = current.chunks_exact(n).map(|line| reduce_line(line, pk, h)).collect();
    }
    Ok(current[0])
}

/// `||f||_{L_p}` with the iterated Riemann-sum quadrature over the periodic box.
pub fn mixed_lp_norm(field: &SampledField, p: &MixedExponents) -> Result<f64> {
    mixed_norm_of_magnitudes(field.spec(), &field.magnitudes(), p)
}

/// Unmixed `||f||_{L_p}` (same exponent on every axis).
pub fn lp_norm(field: &SampledField, p: f64) -> Result<f64> {
    mixed_lp_norm(field, &MixedExponents::uniform(field.spec().ndim(), p)?)
}

/// Parameters of the weighted sequence quasi-norm `l^s_q` with weights `base^(s j)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeqNormParams {
    pub s: f64,
    pub q: f64,
    pub base: f64,
}

impl SeqNormParams {
    pub fn new(s: f64, q: f64) -> Self {
        Self { s, q, base: 2.0 }
    }

    pub fn with_base(mut self, base: f64) -> Self {
        self.base = base;
        self
    }

    fn validate(&self) -> Result<()> {
        if !self.s.is_finite() {
            return Err(Error::InvalidParameter(format!("s = {} must be finite", self.s)));
        }
        if self.q.is_nan() || self.q <= 0.0 {
            return Err(Error::InvalidParameter(format!("q = {} must be > 0", self.q)));
        }
        if !(self.base.is_finite() && self.base > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "base = {} must be > 1",
                self.base
            )));
        }
        Ok(())
    }
}

/// `(sum_j base^(s j q) a_j^q)^(1/q)` for nonnegative `a_j`, evaluated in the
/// log domain so large weights do not overflow.
pub(crate) fn weighted_norm_abs(a: &[f64], params: &SeqNormParams) -> f64 {
    let log_base = params.base.ln();
    let logs: Vec<f64> = a
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0)
        .map(|(j, &v)| params.s * j as f64 * log_base + v.ln())
        .collect();
    let Some(top) = logs.iter().copied().reduce(f64::max) else {
        return 0.0;
    };
    if params.q.is_infinite() {
        return top.exp();
    }
    let sum: f64 = logs.iter().map(|&l| (params.q * (l - top)).exp()).sum();
    (top + sum.ln() / params.q).exp()
}

/// `||a||_{l^s_q}` of a finite sequence `a_0, ..., a_J`.
pub fn weighted_seq_norm(seq: &[Complex64], params: &SeqNormParams) -> Result<f64> {
    if seq.is_empty() {
        return Err(Error::Empty("sequence"));
    }
    params.validate()?;
    if let Some(j) = seq.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFinite { index: j });
    }
    let abs: Vec<f64> = seq.iter().map(|v| v.norm()).collect();
    Ok(weighted_norm_abs(&abs, params))
}

/// Both sides of `||a||_{l^{theta s0 + (1-theta) s1}_q} <= c ||a||_{l^{s0}_inf}^theta ||a||_{l^{s1}_inf}^(1-theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpolationRatio {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// Set when both sides vanish; `ratio` is then reported as 0.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpolationParams {
    pub s0: f64,
    pub s1: f64,
    pub theta: f64,
    pub q: f64,
    pub base: f64,
}

impl InterpolationParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "theta = {} must lie in (0, 1)",
                self.theta
            )));
        }
        if !(self.s1 < self.s0) {
            return Err(Error::InvalidParameter(format!(
                "need s1 < s0, got s1 = {}, s0 = {}",
                self.s1, self.s0
            )));
        }
        SeqNormParams::new(self.s0, self.q)
            .with_base(self.base)
            .validate()
    }

    /// The intermediate smoothness `theta s0 + (1 - theta) s1`.
    pub fn middle(&self) -> f64 {
        self.theta * self.s0 + (1.0 - self.theta) * self.s1
    }
}

fn interpolation_abs(abs: &[f64], params: &InterpolationParams) -> InterpolationRatio {
    let lhs = weighted_norm_abs(abs, &SeqNormParams::new(params.middle(), params.q).with_base(params.base));
    let top = weighted_norm_abs(abs, &SeqNormParams::new(params.s0, f64::INFINITY).with_base(params.base));
    let bottom = weighted_norm_abs(abs, &SeqNormParams::new(params.s1, f64::INFINITY).with_base(params.base));
    let rhs = top.powf(params.theta) * bottom.powf(1.0 - params.theta);
    let (ratio, degenerate) = match (lhs == 0.0, rhs == 0.0) {
        (true, true) => (0.0, true),
        (false, true) => (f64::INFINITY, false),
        _ => (lhs / rhs, false),
    };
    InterpolationRatio {
        lhs,
        rhs,
        ratio,
        degenerate,
    }
}

pub fn interpolation_ratio(seq: &[Complex64], params: &InterpolationParams) -> Result<InterpolationRatio> {
    params.validate()?;
    if seq.is_empty() {
        return Err(Error::Empty("sequence"));
    }
    if let Some(j) = seq.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFinite { index: j });
    }
    let abs: Vec<f64> = seq.iter().map(|v| v.norm()).collect();
    Ok(interpolation_abs(&abs, params))
}

/// Largest interpolation ratio over all nonzero 0/1 sequences of length `len`.
///
/// Sequences shorter than `len` are covered as prefixes padded with zeros.
/// `order_seed` permutes the enumeration order; the maximum does not depend on it.
pub fn binary_sequence_sup(len: usize, params: &InterpolationParams, order_seed: u64) -> Result<(f64, Vec<u8>)> {
    params.validate()?;
    if len == 0 || len > 24 {
        return Err(Error::InvalidParameter(format!("length {len} outside 1..=24")));
    }
    let mut masks: Vec<u32> = (1..(1u32 << len)).collect();
    masks.shuffle(&mut ChaCha8Rng::seed_from_u64(order_seed));
    let mut best = (f64::NEG_INFINITY, 0u32);
    let mut abs = vec![0.0; len];
    for mask in masks {
        for (j, slot) in abs.iter_mut().enumerate() {
            *slot = f64::from((mask >> j) & 1);
        }
        let r = interpolation_abs(&abs, params).ratio;
        if r > best.0 || (r == best.0 && mask < best.1) {
            best = (r, mask);
        }
    }
    let pattern = (0..len).map(|j| ((best.1 >> j) & 1) as u8).collect();
    Ok((best.0, pattern))
}

/// Outcome of `||f + g||^lambda <= ||f||^lambda + ||g||^lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Subadditivity {
    pub lambda: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn power_subadditivity_check(f: &SampledField, g: &SampledField, p: &MixedExponents) -> Result<Subadditivity> {
    if f.spec() != g.spec() {
        return Err(Error::GridMismatch);
    }
    let lambda = p.subadditivity_power();
    let one = Complex64::new(1.0, 0.0);
    let sum = f.combine(one, g, one)?;
    let lhs = mixed_lp_norm(&sum, p)?.powf(lambda);
    let rhs = mixed_lp_norm(f, p)?.powf(lambda) + mixed_lp_norm(g, p)?.powf(lambda);
    Ok(Subadditivity {
        lambda,
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 1e-10),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn constant_on_unit_box() {
        let spec = GridSpec::new(vec![8, 6], vec![1.0, 1.0]).unwrap();
        let f = SampledField::new(spec.clone(), vec![c(1.0); spec.len()]).unwrap();
        let p = MixedExponents::new(vec![2.0, 3.0]).unwrap();
        assert!((mixed_lp_norm(&f, &p).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn unimodular_exponential_with_sup_outer() {
        let spec = GridSpec::torus(2, 16).unwrap();
        let f = SampledField::from_spectrum(spec, &[(vec![1, 0], c(1.0))]).unwrap();
        let p = MixedExponents::new(vec![4.0, f64::INFINITY]).unwrap();
        // |f| = 1, so the inner integral is 2 pi and the outer sup keeps it
        let expected = (2.0 * PI).powf(0.25);
        assert!((mixed_lp_norm(&f, &p).unwrap() - expected).abs() < 1e-13);
    }

    #[test]
    fn separable_factorizes() {
        let spec = GridSpec::new(vec![16, 8], vec![2.0, 5.0]).unwrap();
        let g = |x: f64| 1.0 + 0.5 * (PI * x).cos();
        let h = |y: f64| (0.3 * y).sin().abs() + 0.1;
        let f = SampledField::from_fn(spec, |x| c(g(x[0]) * h(x[1]))).unwrap();
        let gs = GridSpec::new(vec![16], vec![2.0]).unwrap();
        let hs = GridSpec::new(vec![8], vec![5.0]).unwrap();
        let gf = SampledField::from_fn(gs, |x| c(g(x[0]))).unwrap();
        let hf = SampledField::from_fn(hs, |x| c(h(x[0]))).unwrap();
        for (p1, p2) in [(0.5, 3.0), (2.0, 1.0), (f64::INFINITY, 1.5)] {
            let p = MixedExponents::new(vec![p1, p2]).unwrap();
            let lhs = mixed_lp_norm(&f, &p).unwrap();
            let rhs = lp_norm(&gf, p1).unwrap() * lp_norm(&hf, p2).unwrap();
            assert!((lhs - rhs).abs() <= 1e-10 * rhs, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn rejects_bad_exponents() {
        assert!(matches!(
            MixedExponents::new(vec![1.0, 0.0]),
            Err(Error::InvalidExponent { axis: 1, .. })
        ));
        assert!(MixedExponents::new(vec![-2.0]).is_err());
        let spec = GridSpec::torus(2, 4).unwrap();
        let f = SampledField::zeros(spec);
        let p = MixedExponents::new(vec![1.0]).unwrap();
        assert!(matches!(
            mixed_lp_norm(&f, &p),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn seq_norm_examples() {
        let p = SeqNormParams::new(3.0, 0.7);
        assert_eq!(weighted_seq_norm(&[c(1.0), c(0.0), c(0.0)], &p).unwrap(), 1.0);
        let geometric: Vec<_> = (0..=10).map(|j| c(2f64.powi(-j))).collect();
        let sup = weighted_seq_norm(&geometric, &SeqNormParams::new(1.0, f64::INFINITY)).unwrap();
        assert!((sup - 1.0).abs() < 1e-15);
        let sum = weighted_seq_norm(&geometric, &SeqNormParams::new(0.0, 1.0)).unwrap();
        assert!((sum - (2.0 - 2f64.powi(-10))).abs() < 1e-14);
        assert!(weighted_seq_norm(&[], &p).is_err());
        assert!(weighted_seq_norm(&[c(1.0)], &p.with_base(1.0)).is_err());
    }

    #[test]
    fn interpolation_single_term_is_exact() {
        let params = InterpolationParams {
            s0: 1.5,
            s1: -0.5,
            theta: 0.3,
            q: 0.5,
            base: 3.0,
        };
        let mut seq = vec![c(0.0); 7];
        seq[4] = Complex64::new(-2.0, 1.0);
        let r = interpolation_ratio(&seq, &params).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-12);
        assert!(!r.degenerate);
    }

    #[test]
    fn interpolation_all_ones() {
        let n = 9;
        let params = InterpolationParams {
            s0: 1.0,
            s1: -1.0,
            theta: 0.5,
            q: f64::INFINITY,
            base: 2.0,
        };
        let seq = vec![c(1.0); n + 1];
        let r = interpolation_ratio(&seq, &params).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-14);
        assert!((r.rhs - 2f64.powf(n as f64 / 2.0)).abs() < 1e-12 * r.rhs);
        assert!((r.ratio - 2f64.powf(-(n as f64) / 2.0)).abs() < 1e-14);
    }

    #[test]
    fn interpolation_degenerate_and_invalid() {
        let params = InterpolationParams {
            s0: 1.0,
            s1: 0.0,
            theta: 0.5,
            q: 1.0,
            base: 2.0,
        };
        let r = interpolation_ratio(&[c(0.0), c(0.0)], &params).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.ratio, 0.0);
        let bad_theta = InterpolationParams { theta: 1.0, ..params };
        assert!(interpolation_ratio(&[c(1.0)], &bad_theta).is_err());
        let bad_order = InterpolationParams { s1: 1.0, ..params };
        assert!(interpolation_ratio(&[c(1.0)], &bad_order).is_err());
    }

    #[test]
    fn subadditivity_edge_cases() {
        let spec = GridSpec::torus(2, 8).unwrap();
        let f = SampledField::from_spectrum(spec.clone(), &[(vec![1, 2], c(1.0)), (vec![0, 0], c(0.3))]).unwrap();
        let zero = SampledField::zeros(spec.clone());
        let p = MixedExponents::new(vec![0.5, 3.0]).unwrap();
        let r = power_subadditivity_check(&f, &zero, &p).unwrap();
        assert_eq!(r.lambda, 0.5);
        assert!((r.lhs - r.rhs).abs() <= 1e-12 * r.rhs);
        assert!(r.holds);

        // disjoint nonnegative bumps at p = (1, 1): the integral is additive
        let a = SampledField::from_fn(spec.clone(), |x| c(if x[0] < 2.0 { 1.0 + x[1] } else { 0.0 })).unwrap();
        let b = SampledField::from_fn(spec.clone(), |x| c(if x[0] > 3.0 { 2.0 } else { 0.0 })).unwrap();
        let ones = MixedExponents::uniform(2, 1.0).unwrap();
        let r = power_subadditivity_check(&a, &b, &ones).unwrap();
        assert_eq!(r.lambda, 1.0);
        assert!((r.lhs - r.rhs).abs() <= 1e-13 * r.rhs);

        let other = SampledField::zeros(GridSpec::torus(2, 4).unwrap());
        assert!(matches!(
            power_subadditivity_check(&f, &other, &p),
            Err(Error::GridMismatch)
        ));
    }

    #[test]
    fn binary_search_is_order_independent() {
        let params = InterpolationParams {
            s0: 1.0,
            s1: -1.0,
            theta: 0.5,
            q: 1.0,
            base: 2.0,
        };
        let (a, pa) = binary_sequence_sup(8, &params, 1).unwrap();
        let (b, pb) = binary_sequence_sup(8, &params, 99).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        assert_eq!(pa, pb);
        assert!(a.is_finite() && a >= 1.0);
    }
}
