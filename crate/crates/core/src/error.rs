use thiserror::Error;

/// Errors surfaced by every layer of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("mean residual life undefined: {0}")]
    UndefinedMrl(String),

    #[error("mean residual life must be positive, got {value} at t = {t}")]
    NonPositiveMrl { t: f64, value: f64 },

    #[error("integral did not settle: {0}")]
    Divergent(String),

    #[error("no solution found (best residual {residual:.3e}): {message}")]
    NoSolution { message: String, residual: f64 },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
