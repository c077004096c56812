use std::path::PathBuf;

use thiserror::Error;

/// Everything a subcommand can fail with, tagged by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] ksblow_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{failed} of {total} acceptance items failed")]
    Acceptance { failed: usize, total: usize },
}

pub type CliResult<T> = Result<T, CliError>;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_ACCEPTANCE: i32 = 3;

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => EXIT_INPUT,
            CliError::Core(e) if !e.is_numerical() => EXIT_INPUT,
            CliError::Core(_) => EXIT_NUMERICAL,
            CliError::Acceptance { .. } => EXIT_ACCEPTANCE,
        }
    }
}
