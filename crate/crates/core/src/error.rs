use thiserror::Error;

/// Errors raised by the geometry, bound and condition-number routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("not a zero: residual {residual:e} exceeds tolerance {tolerance:e}")]
    NotAZero { residual: f64, tolerance: f64 },

    #[error("not an eigenvalue: residual {residual:e} exceeds tolerance {tolerance:e}")]
    NotAnEigenvalue { residual: f64, tolerance: f64 },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
