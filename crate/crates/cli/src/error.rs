use std::process::ExitCode;

use dispersion::DispersionError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("unknown figure `{0}`")]
    UnknownFigure(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error(transparent)]
    Dispersion(#[from] DispersionError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// 2 for a failed validation, 3 for anything the user can fix in the
    /// configuration, 1 for environment trouble.
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Validation(_) => ExitCode::from(2),
            CliError::Config(_) | CliError::UnknownFigure(_) | CliError::Dispersion(_) => ExitCode::from(3),
            CliError::Io(_) => ExitCode::from(1),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
