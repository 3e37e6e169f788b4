use std::process::ExitCode;

use pointform_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable, malformed or inconsistent configuration.
    #[error("configuration error: {0}")]
    Schema(String),
    /// A computation failed or found nothing.
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{0}")]
    Failed(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code())
    }

    pub fn code(&self) -> u8 {
        match self {
            CliError::Schema(_) => 2,
            _ => 1,
        }
    }

    /// Short machine-readable kind for error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Schema(_) => "schema",
            CliError::Core(CoreError::NoRoot(_)) => "no_root",
            CliError::Core(CoreError::NoConvergence { .. }) => "no_convergence",
            CliError::Core(CoreError::Capacity { .. }) => "capacity",
            CliError::Core(_) => "computation",
            CliError::Failed(_) => "check_failed",
            CliError::Io(_) => "io",
        }
    }
}
