use thiserror::Error;

pub type Result<T> = std::result::Result<T, Sl0Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Sl0Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is {rows}x{cols}; an underdetermined system needs rows <= cols")]
    NotUnderdetermined { rows: usize, cols: usize },

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("empty matrix or vector")]
    Empty,

    #[error("A*A^T is numerically rank deficient (condition estimate {condition:e})")]
    RankDeficient { condition: f64 },

    #[error("{what} needs {count} enumerations, guard limit is {limit} (and at most {max_cols} columns)")]
    TooLarge {
        what: &'static str,
        count: u128,
        limit: u128,
        max_cols: usize,
    },

    #[error("matrix does not have the unique representation property")]
    NotUrp,

    #[error("sigma must be positive and finite, got {0}")]
    NonPositiveSigma(f64),

    #[error(
        "F_sigma stayed at {reached} < {target} after {iterations} inner iterations at sigma = {sigma}"
    )]
    ThresholdUnreachable {
        sigma: f64,
        reached: f64,
        target: f64,
        iterations: usize,
    },

    #[error("vector is identically zero")]
    ZeroVector,

    #[error("k = {k} active entries violates k < n/2 with n = {n}")]
    TooManyActive { k: usize, n: usize },

    #[error("reference signal is zero; SNR is undefined")]
    ZeroReference,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}
