//! Besov and Lizorkin-Triebel quasi-norms computed from a band list.

use serde::{Deserialize, Serialize};

use crate::anisotropy::Anisotropy;
use crate::error::{Error, Result};
use crate::grid::SampledField;
use crate::mixed_norm::{mixed_lp_norm, mixed_norm_of_magnitudes, weighted_norm_abs, MixedExponents, SeqNormParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceFamily {
    /// `B^{s,a}_{p,q}`: `l^s_q` of the band norms.
    B,
    /// `F^{s,a}_{p,q}`: mixed norm of the pointwise `l^s_q` sum.
    F,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub s: f64,
    pub aniso: Anisotropy,
    pub p: MixedExponents,
    pub q: f64,
    pub family: SpaceFamily,
}

impl SpaceParams {
    pub fn new(family: SpaceFamily, s: f64, aniso: Anisotropy, p: MixedExponents, q: f64) -> Result<Self> {
        let params = Self {
            s,
            aniso,
            p,
            q,
            family,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.s.is_finite() {
            return Err(Error::InvalidParameter(format!("s = {} must be finite", self.s)));
        }
        if self.q.is_nan() || self.q <= 0.0 {
            return Err(Error::InvalidParameter(format!("q = {} must be > 0", self.q)));
        }
        if self.aniso.ndim() != self.p.len() {
            return Err(Error::DimensionMismatch {
                expected: self.aniso.ndim(),
                got: self.p.len(),
            });
        }
        if self.family == SpaceFamily::F {
            if let Some(axis) = self.p.as_slice().iter().position(|p| p.is_infinite()) {
                return Err(Error::InvalidParameter(format!(
                    "F-spaces need finite p on every axis (p_{} = inf)",
                    axis + 1
                )));
            }
        }
        Ok(())
    }

    fn with(&self, family: SpaceFamily, q: f64) -> Self {
        Self {
            family,
            q,
            ..self.clone()
        }
    }
}

fn check_bands(bands: &[SampledField], params: &SpaceParams) -> Result<()> {
    let first = bands.first().ok_or(Error::Empty("band list"))?;
    if first.spec().ndim() != params.p.len() {
        return Err(Error::DimensionMismatch {
            expected: first.spec().ndim(),
            got: params.p.len(),
        });
    }
    if bands.iter().any(|b| b.spec() != first.spec()) {
        return Err(Error::GridMismatch);
    }
    params.validate()
}

/// `(sum_j 2^{s j q} ||u_j||_{L_p}^q)^{1/q}`.
pub fn besov_norm(bands: &[SampledField], params: &SpaceParams) -> Result<f64> {
    if params.family != SpaceFamily::B {
        return Err(Error::InvalidParameter("besov_norm needs family B".into()));
    }
    check_bands(bands, params)?;
    let band_norms = bands
        .iter()
        .map(|b| mixed_lp_norm(b, &params.p))
        .collect::<Result<Vec<_>>>()?;
    Ok(weighted_norm_abs(&band_norms, &SeqNormParams::new(params.s, params.q)))
}

/// `|| (sum_j 2^{s q j} |u_j(.)|^q)^{1/q} ||_{L_p}`.
pub fn triebel_norm(bands: &[SampledField], params: &SpaceParams) -> Result<f64> {
    if params.family != SpaceFamily::F {
        return Err(Error::InvalidParameter("triebel_norm needs family F".into()));
    }
    check_bands(bands, params)?;
    let spec = bands[0].spec();
    let seq = SeqNormParams::new(params.s, params.q);
    let magnitudes: Vec<Vec<f64>> = bands.iter().map(|b| b.magnitudes()).collect();
    let mut column = vec![0.0; bands.len()];
    let pointwise: Vec<f64> = (0..spec.len())
        .map(|i| {
            for (slot, m) in column.iter_mut().zip(&magnitudes) {
                *slot = m[i];
            }
            weighted_norm_abs(&column, &seq)
        })
        .collect();
    mixed_norm_of_magnitudes(spec, &pointwise, &params.p)
}

/// Dispatches on `params.family`.
pub fn space_norm(bands: &[SampledField], params: &SpaceParams) -> Result<f64> {
    match params.family {
        SpaceFamily::B => besov_norm(bands, params),
        SpaceFamily::F => triebel_norm(bands, params),
    }
}

/// `B_{p, min p_k} -> F_{p,q} -> B_{p, max p_k}` norm triple for one `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BfbTriple {
    pub q: f64,
    pub besov_min: f64,
    pub triebel: f64,
    pub besov_max: f64,
    /// `||u||_F / ||u||_{B, min p}`.
    pub lower_ratio: f64,
    /// `||u||_{B, max p} / ||u||_F`.
    pub upper_ratio: f64,
}

pub fn bfb_embedding_check(
    bands: &[SampledField],
    s: f64,
    aniso: &Anisotropy,
    p: &MixedExponents,
    qlist: &[f64],
) -> Result<Vec<BfbTriple>> {
    if !p.is_finite() {
        return Err(Error::InvalidParameter("embedding check needs finite p".into()));
    }
    let base = SpaceParams::new(SpaceFamily::B, s, aniso.clone(), p.clone(), p.min())?;
    let besov_min = besov_norm(bands, &base)?;
    let besov_max = besov_norm(bands, &base.with(SpaceFamily::B, p.max()))?;
    qlist
        .iter()
        .map(|&q| {
            let triebel = triebel_norm(bands, &base.with(SpaceFamily::F, q))?;
            Ok(BfbTriple {
                q,
                besov_min,
                triebel,
                besov_max,
                lower_ratio: triebel / besov_min,
                upper_ratio: besov_max / triebel,
            })
        })
        .collect()
}
