use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A sequence or grid is too short or has the wrong shape.
    #[error("size error: {0}")]
    Size(String),

    /// An inconsistent configuration was supplied.
    #[error("configuration error: {0}")]
    Config(String),

    /// A sampling condition required for the requested guarantee does not hold.
    #[error("sampling condition violated: {0}")]
    Condition(String),

    /// The left extension of a sample sequence is too short for compact-exceedance unfolding.
    #[error("insufficient margin: have K' = {have}, need at least {need}")]
    Margin { have: i64, need: i64 },

    /// A numerical procedure did not converge.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Two images or sinograms have incompatible dimensions.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A malformed input file.
    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
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

    pub(crate) fn parse(row: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            row,
            column,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
