use std::path::PathBuf;

use thiserror::Error;

/// Every failure the CLI reports, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{input}: invalid JSON at `{at}`: {message}")]
    Parse { input: String, at: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Invalid(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    /// 0 success, 1 I/O or parse, 2 validation, 3 verification failed.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Usage(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Verification(_) => 3,
        }
    }

    pub fn invalid(e: impl std::fmt::Display) -> Self {
        CliError::Invalid(e.to_string())
    }
}
