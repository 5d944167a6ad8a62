//! Run configuration: a JSON file merged with command-line flags (flags win).

use std::fmt;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Deserializer};

/// Every tunable of every subcommand. Fields a command does not use are ignored.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    /// JSON file with default values for any of the flags below
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Inequality family: npp, mixed-npp, seq-npp, sobolev, lemma1, subadd or all
    #[arg(long)]
    pub ineq: Option<String>,

    /// Number of dimensions
    #[arg(long)]
    pub n: Option<usize>,
    /// Samples per axis (one value or one per axis)
    #[arg(long)]
    #[serde(deserialize_with = "flexible")]
    pub samples: Option<String>,
    /// Period per axis (default 2*pi)
    #[arg(long)]
    #[serde(deserialize_with = "flexible")]
    pub period: Option<String>,
    /// Anisotropy weights a_k >= 1
    #[arg(long)]
    #[serde(deserialize_with = "flexible")]
    pub aniso: Option<String>,
    #[arg(long)]
    pub jmax: Option<usize>,

    /// Source exponents, e.g. `1,2` or `1/2,inf`
    #[arg(long)]
    #[serde(deserialize_with = "flexible")]
    pub p: Option<String>,
    /// Target exponents
    #[arg(long)]
    #[serde(deserialize_with = "flexible")]
    pub r: Option<String>,
    #[arg(long)]
    #[serde(deserialize_with = "flexible")]
    pub q: Option<String>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    /// Space family for `norm` and the Sobolev target: B or F
    #[arg(long)]
    pub family: Option<String>,

    /// Spectral radius (npp) or rectangle half-widths (mixed-npp, subadd)
    #[arg(long = "R")]
    #[serde(rename = "R", deserialize_with = "flexible")]
    pub radius: Option<String>,
    /// Radii of a scaling sweep
    #[arg(long)]
    #[serde(deserialize_with = "flexible")]
    pub radii: Option<String>,
    /// Ensemble kind: random-rect, dirichlet or gaussian-bump
    #[arg(long)]
    pub kind: Option<String>,
    /// Comma-separated ensemble kinds of a sweep
    #[arg(long)]
    #[serde(deserialize_with = "flexible")]
    pub kinds: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Allowed slope deviation of a sweep
    #[arg(long)]
    pub tolerance: Option<f64>,

    /// Input field (MNF1)
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Directory for band files written by `decompose`
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// JSON report path
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// CSV report path
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// Accepts a number, a string, or an array of either, and joins arrays with commas.
fn flexible<'de, D: Deserializer<'de>>(d: D) -> Result<Option<String>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Item {
        Num(f64),
        Text(String),
    }
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Value {
        One(Item),
        Many(Vec<Item>),
    }
    fn show(item: Item) -> String {
        match item {
            Item::Num(x) => x.to_string(),
            Item::Text(s) => s,
        }
    }
    Ok(Option::<Value>::deserialize(d)?.map(|v| match v {
        Value::One(item) => show(item),
        Value::Many(items) => items.into_iter().map(show).collect::<Vec<_>>().join(","),
    }))
}

macro_rules! overlay {
    ($flags:expr, $file:expr, $($field:ident),*) => {
        Settings {
            config: $flags.config,
            $($field: $flags.$field.or($file.$field),)*
        }
    };
}

impl Settings {
    /// Reads `--config` if given and fills every unset flag from it.
    pub fn resolve(self) -> Result<Self, ConfigError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file = load(&path)?;
        Ok(overlay!(
            self, file, ineq, n, samples, period, aniso, jmax, p, r, q, s, t, family, radius, radii, kind, kinds,
            trials, seed, tolerance, input, out_dir, json, csv
        ))
    }
}

fn load(path: &Path) -> Result<Settings, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::single(format!("config: cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| ConfigError::single(format!("config: {}: {e}", path.display())))
}

/// All violations found while validating a configuration.
#[derive(Debug)]
pub struct ConfigError(pub Vec<String>);

impl ConfigError {
    pub fn single(msg: impl Into<String>) -> Self {
        Self(vec![msg.into()])
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "invalid configuration ({} problem(s)):", self.0.len())?;
        for msg in &self.0 {
            writeln!(f, "  - {msg}")?;
        }
        Ok(())
    }
}

/// One exponent: a positive number, `inf`, or a fraction `a/b`.
pub fn parse_exponent(text: &str) -> Result<f64, String> {
    let text = text.trim();
    let value = match text {
        "inf" | "Inf" | "INF" | "infinity" => f64::INFINITY,
        _ => match text.split_once('/') {
            Some((a, b)) => {
                let a: f64 = a.trim().parse().map_err(|_| format!("bad numerator in `{text}`"))?;
                let b: f64 = b.trim().parse().map_err(|_| format!("bad denominator in `{text}`"))?;
                a / b
            }
            None => text.parse().map_err(|_| format!("`{text}` is not a number"))?,
        },
    };
    if value.is_nan() || value <= 0.0 {
        return Err(format!("`{text}` must be > 0"));
    }
    Ok(value)
}

pub fn parse_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',').map(parse_exponent).collect()
}

/// Collects every problem instead of stopping at the first.
#[derive(Default)]
pub struct Checker {
    pub errors: Vec<String>,
}

impl Checker {
    pub fn fail(&mut self, msg: impl Into<String>) {
        self.errors.push(msg.into());
    }

    /// Records a core error under the name of the offending field.
    pub fn check<T>(&mut self, field: &str, r: mnl_core::Result<T>) -> Option<T> {
        r.map_err(|e| self.fail(format!("{field}: {e}"))).ok()
    }

    /// A per-axis list, broadcasting a single value to `n` axes.
    pub fn list(&mut self, field: &str, raw: Option<&str>, default: &str, n: usize) -> Option<Vec<f64>> {
        let raw = raw.unwrap_or(default);
        match parse_list(raw) {
            Ok(v) if v.len() == 1 => Some(vec![v[0]; n]),
            Ok(v) if v.len() == n => Some(v),
            Ok(v) => {
                self.fail(format!("{field}: expected 1 or {n} values, got {}", v.len()));
                None
            }
            Err(e) => {
                self.fail(format!("{field}: {e}"));
                None
            }
        }
    }

    pub fn scalar(&mut self, field: &str, raw: Option<&str>, default: &str) -> Option<f64> {
        match parse_exponent(raw.unwrap_or(default)) {
            Ok(v) => Some(v),
            Err(e) => {
                self.fail(format!("{field}: {e}"));
                None
            }
        }
    }

    pub fn samples(&mut self, raw: Option<&str>, default: usize, n: usize) -> Option<Vec<usize>> {
        let Some(raw) = raw else {
            return Some(vec![default; n]);
        };
        let parsed: Result<Vec<usize>, _> = raw.split(',').map(|s| s.trim().parse::<usize>()).collect();
        match parsed {
            Ok(v) if v.len() == 1 => Some(vec![v[0]; n]),
            Ok(v) if v.len() == n => Some(v),
            Ok(v) => {
                self.fail(format!("samples: expected 1 or {n} values, got {}", v.len()));
                None
            }
            Err(_) => {
                self.fail(format!("samples: `{raw}` is not a list of integers"));
                None
            }
        }
    }

    pub fn finish(self) -> Result<(), ConfigError> {
        if self.errors.is_empty() {
            Ok(())
        } else {
            Err(ConfigError(self.errors))
        }
    }
}
