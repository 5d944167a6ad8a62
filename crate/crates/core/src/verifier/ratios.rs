//! Single-trial ratios `lhs / (rhs_scale * rhs_norm)` for each inequality family.

use serde::{Deserialize, Serialize};

use crate::anisotropy::Anisotropy;
use crate::error::{Error, Result};
use crate::grid::SampledField;
use crate::littlewood_paley::{check_rectangle_condition, spectral_rectangle, LPFamily, SPECTRAL_THRESHOLD};
use crate::mixed_norm::{lp_norm, mixed_lp_norm, mixed_norm_of_magnitudes, MixedExponents};
use crate::space_norms::{space_norm, SpaceFamily, SpaceParams};

/// Largest allowed gap in the Sobolev balance equation.
pub const BALANCE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioTrial {
    pub trial: usize,
    pub lhs: f64,
    pub rhs_scale: f64,
    pub rhs_norm: f64,
    pub ratio: f64,
}

impl RatioTrial {
    pub fn new(lhs: f64, rhs_scale: f64, rhs_norm: f64) -> Self {
        let denom = rhs_scale * rhs_norm;
        let ratio = if lhs == 0.0 && denom == 0.0 {
            0.0
        } else {
            lhs / denom
        };
        Self {
            trial: 0,
            lhs,
            rhs_scale,
            rhs_norm,
            ratio,
        }
    }

    pub fn with_trial(mut self, trial: usize) -> Self {
        self.trial = trial;
        self
    }

    /// Zero input: carries no information about the constant.
    pub fn is_degenerate(&self) -> bool {
        self.lhs == 0.0 && self.rhs_norm == 0.0
    }
}

/// `1/p - 1/r` with `1/inf = 0`.
fn gap(p: f64, r: f64) -> f64 {
    1.0 / p - 1.0 / r
}

fn check_order(p: &[f64], r: &[f64]) -> Result<()> {
    if p.len() != r.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: r.len(),
        });
    }
    for (axis, (&pk, &rk)) in p.iter().zip(r).enumerate() {
        if pk.is_nan() || pk <= 0.0 {
            return Err(Error::InvalidExponent { axis, value: pk });
        }
        if rk.is_nan() || pk > rk {
            return Err(Error::ExponentOrder { axis, p: pk, r: rk });
        }
    }
    Ok(())
}

/// Largest Euclidean `|xi|` over the active spectrum.
pub fn spectral_ball_radius(field: &SampledField) -> f64 {
    let spec = field.spec();
    field
        .active_modes(SPECTRAL_THRESHOLD)
        .into_iter()
        .map(|i| spec.xi_at(i).iter().map(|x| x * x).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

/// `||f||_r <= c R^{n/p - n/r} ||f||_p` for spectrum in the ball of radius `R`.
pub fn npp_ratio(f: &SampledField, p: f64, r: f64, radius: f64) -> Result<RatioTrial> {
    check_order(&[p], &[r])?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParameter(format!("ball radius {radius} must be > 0")));
    }
    let measured = spectral_ball_radius(f);
    if measured > radius * (1.0 + 1e-12) {
        return Err(Error::BallViolation {
            measured,
            declared: radius,
        });
    }
    let n = f.spec().ndim() as f64;
    let rhs_norm = lp_norm(f, p)?;
    if p == r {
        return Ok(RatioTrial::new(rhs_norm, 1.0, rhs_norm));
    }
    let lhs = lp_norm(f, r)?;
    Ok(RatioTrial::new(lhs, radius.powf(n * gap(p, r)), rhs_norm))
}

/// `||f||_{L_r} <= c prod R_k^{1/p_k - 1/r_k} ||f||_{L_p}` for spectrum in `prod [-R_k, R_k]`.
pub fn mixed_npp_ratio(f: &SampledField, p: &MixedExponents, r: &MixedExponents, rect: &[f64]) -> Result<RatioTrial> {
    check_order(p.as_slice(), r.as_slice())?;
    if rect.len() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: rect.len(),
        });
    }
    if let Some(axis) = rect.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidParameter(format!(
            "rectangle half-width on axis {axis} is {}",
            rect[axis]
        )));
    }
    let measured = spectral_rectangle(f, SPECTRAL_THRESHOLD)?;
    for (axis, (&m, &d)) in measured.half_widths.iter().zip(rect).enumerate() {
        if m > d * (1.0 + 1e-12) {
            return Err(Error::SupportViolation {
                axis,
                measured: m,
                declared: d,
            });
        }
    }
    let rhs_norm = mixed_lp_norm(f, p)?;
    if p == r {
        return Ok(RatioTrial::new(rhs_norm, 1.0, rhs_norm));
    }
    let lhs = mixed_lp_norm(f, r)?;
    let scale = p
        .as_slice()
        .iter()
        .zip(r.as_slice())
        .zip(rect)
        .map(|((&pk, &rk), &big_r)| big_r.powf(gap(pk, rk)))
        .product();
    Ok(RatioTrial::new(lhs, scale, rhs_norm))
}

/// Sequence form: `||(sum |f_j|^q)^{1/q}||_{L_r} <= c ||sup_j prod R_k^{j(1/p_k-1/r_k)} |f_j| ||_{L_p}`
/// for sequences obeying the geometric rectangle condition.
pub fn seq_npp_ratio(
    fs: &[SampledField],
    p: &MixedExponents,
    r: &MixedExponents,
    rbase: &[f64],
    a: f64,
    q: f64,
) -> Result<RatioTrial> {
    check_order(p.as_slice(), r.as_slice())?;
    if p == r {
        return Err(Error::InvalidParameter("sequence inequality needs p != r".into()));
    }
    if !r.is_finite() {
        return Err(Error::InvalidParameter("sequence inequality needs every r_k < inf".into()));
    }
    if q.is_nan() || q <= 0.0 {
        return Err(Error::InvalidParameter(format!("q = {q} must be > 0")));
    }
    let first = fs.first().ok_or(Error::Empty("sequence"))?;
    let spec = first.spec();
    if fs.iter().any(|f| f.spec() != spec) {
        return Err(Error::GridMismatch);
    }
    if rbase.len() != p.len() || spec.ndim() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: spec.ndim(),
            got: rbase.len(),
        });
    }
    if !check_rectangle_condition(fs, rbase, a)? {
        return Err(Error::RectangleCondition);
    }
    let log_growth: f64 = p
        .as_slice()
        .iter()
        .zip(r.as_slice())
        .zip(rbase)
        .map(|((&pk, &rk), &base)| gap(pk, rk) * base.ln())
        .sum();
    let magnitudes: Vec<Vec<f64>> = fs.iter().map(|f| f.magnitudes()).collect();
    let weights: Vec<f64> = (0..fs.len()).map(|j| (j as f64 * log_growth).exp()).collect();
    let mut sum_q = vec![0.0; spec.len()];
    let mut sup = vec![0.0f64; spec.len()];
    for (m, w) in magnitudes.iter().zip(&weights) {
        for (i, &v) in m.iter().enumerate() {
            if q.is_infinite() {
                sum_q[i] = f64::max(sum_q[i], v);
            } else {
                sum_q[i] += v.powf(q);
            }
            sup[i] = sup[i].max(w * v);
        }
    }
    if q.is_finite() {
        sum_q.iter_mut().for_each(|v| *v = v.powf(1.0 / q));
    }
    let lhs = mixed_norm_of_magnitudes(spec, &sum_q, r)?;
    let rhs_norm = mixed_norm_of_magnitudes(spec, &sup, p)?;
    Ok(RatioTrial::new(lhs, 1.0, rhs_norm))
}

/// `s - sum a_k/p_k` and `t - sum a_k/r_k`; errors when they differ by more
/// than [`BALANCE_TOLERANCE`].
pub fn check_balance(aniso: &Anisotropy, s: f64, t: f64, p: &MixedExponents, r: &MixedExponents) -> Result<(f64, f64)> {
    if p.len() != aniso.ndim() || r.len() != aniso.ndim() {
        return Err(Error::DimensionMismatch {
            expected: aniso.ndim(),
            got: p.len().max(r.len()),
        });
    }
    let side = |smooth: f64, e: &MixedExponents| {
        smooth
            - aniso
                .weights()
                .iter()
                .zip(e.as_slice())
                .map(|(a, x)| a / x)
                .sum::<f64>()
    };
    let lhs = side(s, p);
    let rhs = side(t, r);
    let gap = (lhs - rhs).abs();
    if !(gap <= BALANCE_TOLERANCE) {
        return Err(Error::Unbalanced { lhs, rhs, gap });
    }
    Ok((lhs, rhs))
}

/// Validated parameters of a Sobolev embedding check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolevParams {
    pub s: f64,
    pub t: f64,
    pub p: MixedExponents,
    pub r: MixedExponents,
    pub q: f64,
    /// `F`: `F^{s}_{p,inf} -> F^{t}_{r,q}`; `B`: `B^{s}_{p,q} -> B^{t}_{r,q}`.
    pub target: SpaceFamily,
}

impl SobolevParams {
    pub fn validate(&self, aniso: &Anisotropy) -> Result<()> {
        check_order(self.p.as_slice(), self.r.as_slice())?;
        if !(self.s > self.t) {
            return Err(Error::InvalidParameter(format!(
                "need s > t, got s = {}, t = {}",
                self.s, self.t
            )));
        }
        if self.q.is_nan() || self.q <= 0.0 {
            return Err(Error::InvalidParameter(format!("q = {} must be > 0", self.q)));
        }
        if self.target == SpaceFamily::F && !(self.r.is_finite() && self.p.is_finite()) {
            return Err(Error::InvalidParameter(
                "F-space embedding needs finite p_k and r_k".into(),
            ));
        }
        check_balance(aniso, self.s, self.t, &self.p, &self.r)?;
        Ok(())
    }
}

/// Embedding ratio evaluated on an existing band decomposition.
pub fn sobolev_ratio_bands(bands: &[SampledField], aniso: &Anisotropy, params: &SobolevParams) -> Result<RatioTrial> {
    params.validate(aniso)?;
    let (source_q, target) = match params.target {
        SpaceFamily::F => (f64::INFINITY, SpaceFamily::F),
        SpaceFamily::B => (params.q, SpaceFamily::B),
    };
    let lhs = space_norm(
        bands,
        &SpaceParams::new(target, params.t, aniso.clone(), params.r.clone(), params.q)?,
    )?;
    let rhs = space_norm(
        bands,
        &SpaceParams::new(target, params.s, aniso.clone(), params.p.clone(), source_q)?,
    )?;
    Ok(RatioTrial::new(lhs, 1.0, rhs))
}

/// `||u||_{F^{t,a}_{r,q}} / ||u||_{F^{s,a}_{p,inf}}` (or the Besov analogue).
pub fn sobolev_ratio(u: &SampledField, family: &LPFamily, params: &SobolevParams) -> Result<RatioTrial> {
    params.validate(family.aniso())?;
    let bands = family.decompose(u)?;
    sobolev_ratio_bands(&bands, family.aniso(), params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn exps(v: &[f64]) -> MixedExponents {
        MixedExponents::new(v.to_vec()).unwrap()
    }

    #[test]
    fn npp_equal_exponents() {
        let spec = GridSpec::torus(2, 16).unwrap();
        let f = SampledField::from_spectrum(spec, &[(vec![1, 2], one()), (vec![0, -1], Complex64::new(0.3, 2.0))]).unwrap();
        let t = npp_ratio(&f, 1.7, 1.7, 3.0).unwrap();
        assert_eq!(t.rhs_scale, 1.0);
        assert_eq!(t.ratio, 1.0);
    }

    #[test]
    fn npp_unimodular_exponential() {
        let spec = GridSpec::torus(1, 16).unwrap();
        let f = SampledField::from_spectrum(spec, &[(vec![1], one())]).unwrap();
        let t = npp_ratio(&f, 1.0, f64::INFINITY, 1.0).unwrap();
        assert!((t.lhs - 1.0).abs() < 1e-14);
        assert!((t.rhs_norm - 2.0 * PI).abs() < 1e-13);
        assert!((t.ratio - 1.0 / (2.0 * PI)).abs() < 1e-14);
    }

    #[test]
    fn npp_dirichlet_kernel() {
        let k = 8i64;
        let spec = GridSpec::torus(1, 64).unwrap();
        let coeffs: Vec<_> = (-k..=k).map(|j| (vec![j], one())).collect();
        let f = SampledField::from_spectrum(spec, &coeffs).unwrap();
        let t = npp_ratio(&f, 2.0, f64::INFINITY, k as f64).unwrap();
        // ||D||_inf = 2K+1, ||D||_2 = sqrt(2 pi (2K+1))
        let expected = ((2 * k + 1) as f64 / (2.0 * PI * k as f64)).sqrt();
        assert!((t.ratio - expected).abs() < 1e-12);
    }

    #[test]
    fn npp_errors() {
        let spec = GridSpec::torus(1, 16).unwrap();
        let f = SampledField::from_spectrum(spec, &[(vec![3], one())]).unwrap();
        assert!(matches!(npp_ratio(&f, 1.0, 2.0, 2.0), Err(Error::BallViolation { .. })));
        assert!(matches!(npp_ratio(&f, 3.0, 2.0, 4.0), Err(Error::ExponentOrder { .. })));
    }

    #[test]
    fn mixed_npp_separable_factorizes() {
        let spec = GridSpec::torus(2, 16).unwrap();
        let f = SampledField::from_spectrum(spec.clone(), &[(vec![2, 3], one())]).unwrap();
        let t = mixed_npp_ratio(&f, &exps(&[1.0, 2.0]), &exps(&[4.0, f64::INFINITY]), &[2.0, 3.0]).unwrap();
        let g = SampledField::from_spectrum(GridSpec::torus(1, 16).unwrap(), &[(vec![2], one())]).unwrap();
        let h = SampledField::from_spectrum(GridSpec::torus(1, 16).unwrap(), &[(vec![3], one())]).unwrap();
        let expected = npp_ratio(&g, 1.0, 4.0, 2.0).unwrap().ratio * npp_ratio(&h, 2.0, f64::INFINITY, 3.0).unwrap().ratio;
        assert!((t.ratio - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn mixed_npp_errors() {
        let spec = GridSpec::torus(2, 16).unwrap();
        let f = SampledField::from_spectrum(spec, &[(vec![2, 3], one())]).unwrap();
        assert!(matches!(
            mixed_npp_ratio(&f, &exps(&[1.0, 3.0]), &exps(&[2.0, 2.0]), &[2.0, 3.0]),
            Err(Error::ExponentOrder { axis: 1, .. })
        ));
        assert!(matches!(
            mixed_npp_ratio(&f, &exps(&[1.0, 1.0]), &exps(&[2.0, 2.0]), &[2.0, 2.5]),
            Err(Error::SupportViolation { axis: 1, .. })
        ));
        let same = mixed_npp_ratio(&f, &exps(&[1.0, 3.0]), &exps(&[1.0, 3.0]), &[2.0, 3.0]).unwrap();
        assert_eq!(same.ratio, 1.0);
    }

    #[test]
    fn seq_npp_hypotheses() {
        let spec = GridSpec::torus(1, 32).unwrap();
        let fs = vec![SampledField::from_spectrum(spec.clone(), &[(vec![1], one())]).unwrap()];
        let p = exps(&[1.0]);
        assert!(seq_npp_ratio(&fs, &p, &p, &[2.0], 1.0, 2.0).is_err());
        assert!(seq_npp_ratio(&fs, &p, &exps(&[f64::INFINITY]), &[2.0], 1.0, 2.0).is_err());
        let wide = vec![SampledField::from_spectrum(spec, &[(vec![3], one())]).unwrap()];
        assert!(matches!(
            seq_npp_ratio(&wide, &p, &exps(&[2.0]), &[2.0], 1.0, 2.0),
            Err(Error::RectangleCondition)
        ));
    }

    #[test]
    fn seq_npp_constant_only() {
        let spec = GridSpec::new(vec![8, 8], vec![1.0, 4.0]).unwrap();
        let mut fs = vec![SampledField::new(spec.clone(), vec![Complex64::new(3.0, 0.0); 64]).unwrap()];
        fs.push(SampledField::zeros(spec.clone()));
        fs.push(SampledField::zeros(spec));
        let p = exps(&[1.0, 2.0]);
        let r = exps(&[2.0, 4.0]);
        let t = seq_npp_ratio(&fs, &p, &r, &[2.0, 2.0], 1.0, 1.0).unwrap();
        // |f_0| = 3 on a box of measure 4: ||3||_{(2,4)} = 3 * 1^{1/2} * 4^{1/4}, ||3||_{(1,2)} = 3 * 1 * 4^{1/2}
        let expected = 4f64.powf(0.25) / 4f64.powf(0.5);
        assert!((t.ratio - expected).abs() < 1e-13);
    }

    #[test]
    fn balance_gate() {
        let aniso = Anisotropy::isotropic(2);
        let p = exps(&[1.0, 1.0]);
        let r = exps(&[2.0, 2.0]);
        assert!(check_balance(&aniso, 1.0, 0.0, &p, &r).is_ok());
        match check_balance(&aniso, 1.0, 0.5, &p, &r) {
            Err(Error::Unbalanced { lhs, rhs, .. }) => {
                assert_eq!(lhs, -1.0);
                assert_eq!(rhs, -0.5);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
