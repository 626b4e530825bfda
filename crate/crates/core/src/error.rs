use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed hostname {0:?}")]
    MalformedHostname(String),

    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },

    #[error("link {src} -> {dst}: endpoint {missing} is not a crawled site")]
    ReferentialIntegrity {
        src: String,
        dst: String,
        missing: String,
    },

    #[error("site {site}: {message}")]
    InvariantViolation { site: String, message: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("inconsistent input: {0}")]
    InconsistentInput(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
