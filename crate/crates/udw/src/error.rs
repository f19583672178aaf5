use std::path::PathBuf;

use thiserror::Error;

/// Everything the command line can fail with. [`CliError::exit_code`] maps
/// each to the process status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}:{line}: {msg}")]
    Config {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("invalid {field}: {msg}")]
    Invalid { field: &'static str, msg: String },
    #[error(transparent)]
    Core(#[from] udw_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

pub const EXIT_ACCURACY: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_IO: i32 = 4;

impl CliError {
    pub fn invalid(field: &'static str, msg: impl Into<String>) -> Self {
        CliError::Invalid {
            field,
            msg: msg.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_accuracy() => EXIT_ACCURACY,
            CliError::Core(udw_core::Error::Degenerate { .. }) => EXIT_ACCURACY,
            CliError::Io { .. } => EXIT_IO,
            _ => EXIT_DOMAIN,
        }
    }
}
