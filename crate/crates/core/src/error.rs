use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("negative probability {value} at (a={a}, b={b}, s={s})")]
    NegativeProbability { a: usize, b: usize, s: usize, value: f64 },

    #[error("non-finite probability at (a={a}, b={b}, s={s})")]
    NonFinite { a: usize, b: usize, s: usize },

    #[error("row (a={a}, b={b}) is not normalized: deficit {deficit:e}")]
    RowNotNormalized { a: usize, b: usize, deficit: f64 },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("index {index} out of range (length {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// `required` saturates at `u128::MAX`.
    #[error("enumeration needs {required} outcome tuples but the cap is {cap}")]
    SizeOverflow { required: u128, cap: usize },

    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    #[error("invalid coupling: {0}")]
    InvalidCoupling(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("unsupported moment order {0} (only 2 and 4)")]
    UnsupportedMoment(u32),

    #[error("channel is not row-stochastic: {0}")]
    NonStochasticInput(String),

    #[error("no convergence after {iterations} iterations (best gap {best_gap:e})")]
    NonConvergence { iterations: usize, best_gap: f64 },

    #[error("beta {beta} outside the admissible region [{lo}, {hi}]")]
    RegionViolation { beta: f64, lo: f64, hi: f64 },

    #[error("dimension {0} unsupported: the analytic bound is only established for N in 2..=4")]
    UnsupportedDimension(usize),

    #[error("box digest mismatch: certificate has {expected}, box has {found}")]
    DigestMismatch { expected: String, found: String },

    #[error("dual point infeasible: constraint value {violation:e} at s = {witness:?}")]
    Infeasible { violation: f64, witness: Vec<usize> },

    #[error("claimed bound {claimed} bits exceeds verified bound {verified} bits")]
    OverClaimed { claimed: f64, verified: f64 },

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
