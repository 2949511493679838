use std::path::PathBuf;

use sbl_core::SblError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Scenario file problem, located by line when possible.
    #[error("{origin}: {message}")]
    Scenario { origin: String, message: String },

    #[error(transparent)]
    Core(#[from] SblError),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn scenario(origin: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Scenario {
            origin: origin.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 2 configuration, 3 numeric, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Scenario { .. } => 2,
            CliError::Io { .. } => 4,
            CliError::Core(e) => match e {
                SblError::InvalidInput(_)
                | SblError::InvalidParameter { .. }
                | SblError::Configuration(_) => 2,
                SblError::DivergenceUndefined { .. }
                | SblError::MustRegularize { .. }
                | SblError::InvalidState(_)
                | SblError::NumericFailure(_) => 3,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
