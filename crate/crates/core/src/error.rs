use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong inside the pipeline.
///
/// The variants line up with the CLI exit codes: parameter and config
/// problems are the caller's fault (exit 2), data, shape and format problems
/// come from the inputs (exit 3).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("format error at byte {offset}: {msg}")]
    Format { offset: u64, msg: String },
    #[error("complex violates the filtration contract: {0}")]
    Contract(String),
    #[error("input too large: {0}")]
    Size(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code the CLI reports for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Param(_) | Error::Config(_) | Error::Io { .. } => 2,
            Error::Shape(_) | Error::Data(_) | Error::Format { .. } | Error::Contract(_) | Error::Size(_) => 3,
        }
    }
}
