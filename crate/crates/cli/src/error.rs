use std::io;

use thiserror::Error;

/// Errors surfaced by the experiment runner, each with a stable exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error(transparent)]
    Core(#[from] admeta_core::Error),

    #[error("threshold not met: {0}")]
    Threshold(String),
}

impl CliError {
    /// 0 success, 1 threshold/numeric failure, 2 usage or config error, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Threshold(_) => 1,
            CliError::Core(admeta_core::Error::NonFinite { .. }) => 1,
            CliError::Config(_) | CliError::Core(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(io::Error::other(e))
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
