//! CLI error type mapping failures to exit codes.

use thiserror::Error;

/// What went wrong, carrying the process exit code: configuration and
/// environment problems are usage errors (1); malformed data aborts the run
/// only under `--strict` (2).
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error(transparent)]
    Other(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Other(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}
