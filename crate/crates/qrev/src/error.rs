use std::io;
use std::path::{Path, PathBuf};

use qrev_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },
}

impl CliError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn format(path: &Path, reason: impl Into<String>) -> Self {
        CliError::Format {
            path: path.to_path_buf(),
            reason: reason.into(),
        }
    }

    /// 2 config error, 3 numeric failure, 4 precondition violation, 1 IO.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Precondition(_) | CliError::Format { .. } => 4,
            CliError::Io { .. } => 1,
            CliError::Core(e) => match e {
                CoreError::InvalidBasis(_) => 2,
                CoreError::NonFinite(_)
                | CoreError::GevreyRange { .. }
                | CoreError::EnumerationBudget { .. }
                | CoreError::NonFiniteState { .. }
                | CoreError::NonConvergence { .. }
                | CoreError::WeightOverflow(_) => 3,
                _ => 4,
            },
        }
    }
}
