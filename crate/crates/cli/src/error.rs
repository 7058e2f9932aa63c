use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error(transparent)]
    Numeric(#[from] coot_core::Error),
    #[error("solver stopped at the iteration limit (pass --allow-maxiter to accept)")]
    NotConverged,
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Self::Io {
            path: path.into(),
            message: message.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 1,
            Self::Io { .. } => 2,
            Self::Numeric(coot_core::Error::Config(_)) => 1,
            Self::Numeric(_) => 3,
            Self::NotConverged => 4,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
