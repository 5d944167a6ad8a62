//! Quasi-homogeneous dilations and the anisotropic distance `|x|_a`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inputs with `max |x_k|` below this are treated as the origin.
pub const UNDERFLOW_THRESHOLD: f64 = 1e-300;

const MAX_ITERATIONS: usize = 200;

/// Coordinate weights `(a_1, ..., a_n)`, each at least 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Anisotropy(Vec<f64>);

impl Anisotropy {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::Empty("anisotropy weights"));
        }
        if let Some((k, v)) = a.iter().enumerate().find(|(_, &v)| !(v.is_finite() && v >= 1.0)) {
            return Err(Error::InvalidParameter(format!(
                "anisotropy weight a_{} = {v} must be finite and >= 1",
                k + 1
            )));
        }
        Ok(Self(a))
    }

    pub fn isotropic(n: usize) -> Self {
        Self(vec![1.0; n])
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn ndim(&self) -> usize {
        self.0.len()
    }

    pub fn max_weight(&self) -> f64 {
        self.0.iter().copied().fold(1.0, f64::max)
    }

    pub fn is_isotropic(&self) -> bool {
        self.0.iter().all(|&a| a == 1.0)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.0.len() {
            return Err(Error::DimensionMismatch {
                expected: self.0.len(),
                got: len,
            });
        }
        Ok(())
    }

    /// `t^a x = (t^{a_1} x_1, ..., t^{a_n} x_n)`.
    pub fn dilate(&self, t: f64, x: &[f64]) -> Result<Vec<f64>> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::InvalidParameter(format!("dilation factor {t} must be >= 0")));
        }
        self.check_len(x.len())?;
        Ok(x.iter().zip(&self.0).map(|(xk, ak)| t.powf(*ak) * xk).collect())
    }

    /// The sandwich bounds `max |x_k|^{1/a_k} <= |x|_a <= sum |x_k|^{1/a_k}`.
    pub fn bounds(&self, x: &[f64]) -> (f64, f64) {
        x.iter().zip(&self.0).fold((0.0f64, 0.0f64), |(lo, hi), (xk, ak)| {
            let v = xk.abs().powf(1.0 / ak);
            (lo.max(v), hi + v)
        })
    }

    /// `|x|_a`: the unique `t > 0` with `sum x_k^2 t^{-2 a_k} = 1`, and 0 at the origin.
    ///
    /// The root is bracketed by [`Anisotropy::bounds`] and refined by Newton's
    /// method on `log t`, falling back to bisection whenever a step leaves the
    /// bracket.
    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x.len())?;
        if let Some(k) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite coordinate x_{}", k + 1)));
        }
        Ok(self.distance_unchecked(x))
    }

    pub(crate) fn distance_unchecked(&self, x: &[f64]) -> f64 {
        let sup = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if sup < UNDERFLOW_THRESHOLD {
            return 0.0;
        }
        let (lo, hi) = self.bounds(x);
        if lo == hi {
            return lo;
        }
        // log-space terms avoid overflow in x_k^2 and t^{-2 a_k}
        let logs: Vec<(f64, f64)> = x
            .iter()
            .zip(&self.0)
            .filter(|(xk, _)| **xk != 0.0)
            .map(|(xk, ak)| (xk.abs().ln(), *ak))
            .collect();
        // g(tau) = sum exp(2 (ln|x_k| - a_k tau)) - 1 is strictly decreasing in tau = ln t
        let eval = |tau: f64| {
            logs.iter().fold((-1.0, 0.0), |(g, dg), &(lx, a)| {
                let term = (2.0 * (lx - a * tau)).exp();
                (g + term, dg - 2.0 * a * term)
            })
        };
        let (mut a, mut b) = (lo.ln(), hi.ln());
        let mut tau = 0.5 * (a + b);
        for _ in 0..MAX_ITERATIONS {
            let (g, dg) = eval(tau);
            if g == 0.0 {
                break;
            }
            if g > 0.0 {
                a = tau;
            } else {
                b = tau;
            }
            let newton = tau - g / dg;
            let next = if newton > a && newton < b {
                newton
            } else {
                0.5 * (a + b)
            };
            let step = (next - tau).abs();
            tau = next;
            if step <= 1e-15 * tau.abs().max(1.0) || b - a <= 1e-15 * tau.abs().max(1.0) {
                break;
            }
        }
        tau.exp()
    }
}

/// `H(y) = sum R_k |y_k|`, the supporting function of the rectangle `prod [-R_k, R_k]`.
pub fn supporting_function_rect(half_widths: &[f64], y: &[f64]) -> Result<f64> {
    if half_widths.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: half_widths.len(),
            got: y.len(),
        });
    }
    if let Some(k) = half_widths.iter().position(|&r| !(r > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "rectangle half-width R_{} = {} must be > 0",
            k + 1,
            half_widths[k]
        )));
    }
    Ok(half_widths.iter().zip(y).map(|(r, yk)| r * yk.abs()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corner_max(r: &[f64], y: &[f64]) -> f64 {
        let n = r.len();
        (0..1u32 << n)
            .map(|mask| {
                (0..n)
                    .map(|k| {
                        let sign = if mask >> k & 1 == 1 { 1.0 } else { -1.0 };
                        sign * r[k] * y[k]
                    })
                    .sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn dilation_examples() {
        let a = Anisotropy::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(a.dilate(1.0, &[3.0, -7.0]).unwrap(), vec![3.0, -7.0]);
        assert_eq!(a.dilate(4.0, &[1.0, 1.0]).unwrap(), vec![4.0, 16.0]);
        let b = Anisotropy::new(vec![1.0, 3.0]).unwrap();
        assert_eq!(b.dilate(2.0, &[3.0, -5.0]).unwrap(), vec![6.0, -40.0]);
        assert!(a.dilate(-1.0, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn dilation_composes() {
        let a = Anisotropy::new(vec![1.0, 2.5, 1.3]).unwrap();
        let x = [0.3, -1.2, 2.0];
        let direct = a.dilate(0.7 * 3.1, &x).unwrap();
        let nested = a.dilate(0.7, &a.dilate(3.1, &x).unwrap()).unwrap();
        for (u, v) in direct.iter().zip(&nested) {
            assert!((u - v).abs() <= 1e-12 * u.abs().max(1.0));
        }
    }

    #[test]
    fn distance_examples() {
        let iso = Anisotropy::isotropic(2);
        assert!((iso.distance(&[3.0, 4.0]).unwrap() - 5.0).abs() < 1e-14);
        let a = Anisotropy::new(vec![1.0, 2.0]).unwrap();
        assert!((a.distance(&[0.0, 9.0]).unwrap() - 3.0).abs() < 1e-14);
        // u = t^2 solves u^2 - 9u - 16 = 0
        let expected = ((9.0 + 145f64.sqrt()) / 2.0).sqrt();
        assert!((a.distance(&[3.0, 4.0]).unwrap() - expected).abs() < 1e-13);
        assert!((expected - 3.2435778).abs() < 1e-7);
        assert_eq!(a.distance(&[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(a.distance(&[1e-301, 0.0]).unwrap(), 0.0);
        assert!(a.distance(&[f64::NAN, 1.0]).is_err());
        assert!(a.distance(&[1.0]).is_err());
    }

    #[test]
    fn extreme_magnitudes() {
        let a = Anisotropy::new(vec![1.0, 3.0]).unwrap();
        for x in [[1e200, 1e250], [1e-200, 3e-250], [5.0, 1e-290]] {
            let t = a.distance(&x).unwrap();
            let resid: f64 = x
                .iter()
                .zip(a.weights())
                .map(|(xk, ak)| (2.0 * (xk.abs().ln() - ak * t.ln())).exp())
                .sum();
            assert!((resid - 1.0).abs() < 1e-10, "{x:?}: {resid}");
        }
    }

    #[test]
    fn weights_validated() {
        assert!(Anisotropy::new(vec![0.5]).is_err());
        assert!(Anisotropy::new(vec![]).is_err());
        assert!(Anisotropy::new(vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn supporting_function_examples() {
        assert_eq!(supporting_function_rect(&[1.0, 2.0], &[1.0, 1.0]).unwrap(), 3.0);
        assert_eq!(supporting_function_rect(&[1.0, 2.0], &[0.0, 0.0]).unwrap(), 0.0);
        let r = [1.0, 1.0, 1.0];
        let y = [1.0, -2.0, 3.0];
        assert_eq!(supporting_function_rect(&r, &y).unwrap(), 6.0);
        assert_eq!(corner_max(&r, &y), 6.0);
        assert!(supporting_function_rect(&[1.0, 0.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn supporting_function_matches_corners() {
        let cases: [(&[f64], &[f64]); 3] = [
            (&[0.5, 2.0, 3.0, 1.5], &[-1.0, 0.25, 2.0, -3.0]),
            (&[4.0], &[-0.75]),
            (&[1.0, 7.0], &[2.0, -0.1]),
        ];
        for (r, y) in cases {
            let h = supporting_function_rect(r, y).unwrap();
            assert!((h - corner_max(r, y)).abs() < 1e-14);
        }
    }
}
