use std::path::PathBuf;

use vml_core::VmlError;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] VmlError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Config parse or validation failure; the message carries the location.
    #[error("{0}")]
    Config(String),

    #[error("csv: {0}")]
    Csv(String),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 3 for a non-finite abort, 2 for everything else.
    /// Failed verification checks exit with 1 without raising an error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(VmlError::NonFinite { .. }) => 3,
            _ => 2,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Csv(e.to_string())
    }
}
