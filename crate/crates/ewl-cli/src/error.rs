//! Process-level errors, split by exit code: usage errors exit with 2,
//! runtime errors with 1.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, bad config file, or invalid parameter values.
    #[error("{0}")]
    Usage(String),
    /// Failures after a valid configuration: I/O, simulation, rendering.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

impl From<ewl_core::Error> for CliError {
    fn from(e: ewl_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

/// Shorthand for config-stage failures.
pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Shorthand for run-stage failures.
pub fn runtime(msg: impl Into<String>) -> CliError {
    CliError::Runtime(msg.into())
}
