use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("frequency {frequency} on axis {axis} is outside the Nyquist range (|k| < {limit})")]
    FrequencyOutOfRange {
        axis: usize,
        frequency: i64,
        limit: i64,
    },

    #[error("non-finite value at sample {index}")]
    NonFinite { index: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("invalid exponent on axis {axis}: {value} (must be > 0)")]
    InvalidExponent { axis: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("jmax = {jmax} too large: level {jmax} corona reaches {reach} on axis {axis}, Nyquist is {nyquist}")]
    LevelTooLarge {
        jmax: usize,
        axis: usize,
        reach: f64,
        nyquist: f64,
    },

    #[error("spectrum not admissible for decomposition: largest active |xi|_a = {largest}, limit {limit}")]
    NotBandLimited { largest: f64, limit: f64 },

    #[error("spectral support exceeds declared bound on axis {axis}: measured {measured}, declared {declared}")]
    SupportViolation {
        axis: usize,
        measured: f64,
        declared: f64,
    },

    #[error("spectral support radius {measured} exceeds declared ball radius {declared}")]
    BallViolation { measured: f64, declared: f64 },

    #[error("exponent order violated on axis {axis}: p = {p} > r = {r}")]
    ExponentOrder { axis: usize, p: f64, r: f64 },

    #[error(
        "balance violated: s - sum(a_k/p_k) = {lhs} but t - sum(a_k/r_k) = {rhs} (gap {gap:e} > 1e-12)"
    )]
    Unbalanced { lhs: f64, rhs: f64, gap: f64 },

    #[error("geometric rectangle condition fails")]
    RectangleCondition,

    #[error("bad magic: expected \"MNF1\"")]
    BadMagic,

    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },

    #[error("dimension overflow in header")]
    DimensionOverflow,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable numeric code, distinct per failure class of the field file reader.
    pub fn code(&self) -> u32 {
        match self {
            Error::InvalidGrid(_) => 10,
            Error::FrequencyOutOfRange { .. } => 11,
            Error::NonFinite { .. } => 12,
            Error::DimensionMismatch { .. } => 13,
            Error::GridMismatch => 14,
            Error::InvalidExponent { .. } => 15,
            Error::InvalidParameter(_) => 16,
            Error::Empty(_) => 17,
            Error::LevelTooLarge { .. } => 20,
            Error::NotBandLimited { .. } => 21,
            Error::SupportViolation { .. } => 30,
            Error::BallViolation { .. } => 34,
            Error::ExponentOrder { .. } => 31,
            Error::Unbalanced { .. } => 32,
            Error::RectangleCondition => 33,
            Error::BadMagic => 40,
            Error::Truncated { .. } => 41,
            Error::DimensionOverflow => 42,
            Error::Io(_) => 50,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
