use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid grid bounds, kernel settings, run configuration and the like.
    #[error("configuration error in `{name}`: {reason}")]
    Config { name: String, reason: String },

    #[error("grid indices {indices:?} do not fit the search space: {reason}")]
    InvalidIndices { indices: Vec<usize>, reason: String },

    #[error("objective returned non-finite value {value} at indices {indices:?}")]
    NonFiniteValue { indices: Vec<usize>, value: f64 },

    /// The Gaussian-process factorization failed even after jitter escalation.
    #[error("surrogate fit failed: {0}")]
    Surrogate(String),

    #[error("solver failed: {0}")]
    Solver(String),

    #[error("malformed {what}: {reason}")]
    Parse { what: String, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command-line harness: 2 for configuration
    /// problems, 3 for everything that went wrong at run time.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Parse { .. } | Error::Json(_) => 2,
            _ => 3,
        }
    }
}
