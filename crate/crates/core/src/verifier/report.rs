use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::ratios::RatioTrial;

pub const REPORT_VERSION: u32 = 1;

/// Constants are maxima over periodic-box ensembles, not sharp constants on `R^n`.
pub const CONSTANT_LABEL: &str = "torus-empirical";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// Least-squares line `y = slope x + intercept`; `residual` is the RMS misfit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
}

pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum::<f64>()
        / nf)
        .sqrt();
    Some(LinearFit {
        slope,
        intercept,
        residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub radius: f64,
    pub c_emp: f64,
    pub trials: Vec<RatioTrial>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub points: Vec<SweepPoint>,
    pub fit: LinearFit,
    pub predicted_slope: f64,
    pub tolerance: f64,
}

/// A named sub-check folded into the verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub report_version: u32,
    pub family: String,
    pub config: BTreeMap<String, String>,
    pub trials: Vec<RatioTrial>,
    pub skipped: usize,
    pub c_emp: f64,
    pub constant_label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSummary>,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
}

/// Max ratio over non-degenerate trials, and the number skipped.
pub fn empirical_constant(trials: &[RatioTrial]) -> (f64, usize) {
    let skipped = trials.iter().filter(|t| t.is_degenerate()).count();
    let c = trials
        .iter()
        .filter(|t| !t.is_degenerate())
        .map(|t| t.ratio)
        .fold(f64::NEG_INFINITY, |m, r| if r.is_nan() { f64::NAN } else { m.max(r) });
    (c, skipped)
}

impl VerificationReport {
    pub fn new(family: impl Into<String>, config: BTreeMap<String, String>, trials: Vec<RatioTrial>) -> Self {
        let (c_emp, skipped) = empirical_constant(&trials);
        let mut report = Self {
            report_version: REPORT_VERSION,
            family: family.into(),
            config,
            trials,
            skipped,
            c_emp,
            constant_label: CONSTANT_LABEL.to_string(),
            sweep: None,
            checks: Vec::new(),
            verdict: Verdict::Fail,
        };
        report.refresh_verdict();
        report
    }

    pub fn with_check(mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
        self.refresh_verdict();
        self
    }

    pub fn with_sweep(mut self, sweep: SweepSummary) -> Self {
        self.sweep = Some(sweep);
        self.refresh_verdict();
        self
    }

    fn refresh_verdict(&mut self) {
        let constant_ok = self.c_emp.is_finite();
        let sweep_ok = self
            .sweep
            .as_ref()
            .is_none_or(|s| (s.fit.slope - s.predicted_slope).abs() <= s.tolerance);
        let checks_ok = self.checks.iter().all(|c| c.passed);
        self.verdict = Verdict::from_bool(constant_ok && sweep_ok && checks_ok);
    }

    /// Per-trial CSV: `trial,lhs,rhs_scale,rhs_norm,ratio`, with leading `R`
    /// and trailing `c_emp` columns for sweeps.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match &self.sweep {
            None => {
                out.push_str("trial,lhs,rhs_scale,rhs_norm,ratio\n");
                for t in &self.trials {
                    let _ = writeln!(out, "{},{},{},{},{}", t.trial, t.lhs, t.rhs_scale, t.rhs_norm, t.ratio);
                }
            }
            Some(sweep) => {
                out.push_str("R,trial,lhs,rhs_scale,rhs_norm,ratio,c_emp\n");
                for point in &sweep.points {
                    for t in &point.trials {
                        let _ = writeln!(
                            out,
                            "{},{},{},{},{},{},{}",
                            point.radius, t.trial, t.lhs, t.rhs_scale, t.rhs_norm, t.ratio, point.c_emp
                        );
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 * x - 2.0).collect();
        let fit = least_squares(&xs, &ys).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-14);
        assert!((fit.intercept + 2.0).abs() < 1e-14);
        assert!(fit.residual < 1e-14);
        assert!(least_squares(&[1.0, 1.0], &[0.0, 1.0]).is_none());
    }

    #[test]
    fn degenerate_trials_are_skipped() {
        let trials = vec![
            RatioTrial::new(0.0, 1.0, 0.0),
            RatioTrial::new(2.0, 1.0, 4.0).with_trial(1),
        ];
        let report = VerificationReport::new("npp", BTreeMap::new(), trials);
        assert_eq!(report.skipped, 1);
        assert_eq!(report.c_emp, 0.5);
        assert!(report.verdict.passed());
        let report = report.with_check("x", false, "");
        assert!(!report.verdict.passed());
    }

    #[test]
    fn csv_layout() {
        let report = VerificationReport::new("npp", BTreeMap::new(), vec![RatioTrial::new(1.0, 2.0, 0.25)]);
        assert_eq!(report.to_csv(), "trial,lhs,rhs_scale,rhs_norm,ratio\n0,1,2,0.25,2\n");
    }
}
