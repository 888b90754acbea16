use std::path::PathBuf;

use spinprep_core::Error as CoreError;

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// Exit status when output files cannot be written.
pub const EXIT_IO: i32 = 1;
/// Exit status for invalid flags, config files, labels or noise models.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status for failures inside a numerical routine.
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Read { .. } => EXIT_CONFIG,
            CliError::Write { .. } => EXIT_IO,
            CliError::Core(e) => match e {
                CoreError::NegativeSpin(_)
                | CoreError::ParityMismatch { .. }
                | CoreError::ProjectionOutOfRange { .. }
                | CoreError::Triangle { .. }
                | CoreError::InvalidTree(_)
                | CoreError::InvalidLabel(_)
                | CoreError::EmptySubset
                | CoreError::QubitOutOfRange { .. }
                | CoreError::RegisterTooLarge { .. }
                | CoreError::InvalidNoise(_)
                | CoreError::ParameterCount { .. }
                | CoreError::TooFewPoints
                | CoreError::InvalidNoiseParameter(_) => EXIT_CONFIG,
                _ => EXIT_NUMERICAL,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
