use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    /// Problems with the content of a data file or an in-memory dataset.
    #[error("data error: {0}")]
    Data(String),

    /// Invalid configuration or arguments.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A learner could not be fitted (degenerate weights, no usable round, ...).
    #[error("training error: {0}")]
    Training(String),
}

impl Error {
    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn training(msg: impl Into<String>) -> Self {
        Error::Training(msg.into())
    }
}
