use thiserror::Error;

/// Errors raised by optimizers, problems and metrics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid hyperparameters: {0}")]
    InvalidHyperParams(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown {what} `{name}`")]
    Unknown { what: &'static str, name: String },

    #[error("operation not supported: {0}")]
    Unsupported(String),

    #[error("non-finite value produced at step {step}")]
    NonFinite { step: u64 },

    #[error("trace is missing parameter snapshots")]
    MissingSnapshots,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
