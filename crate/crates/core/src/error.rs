use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = AseError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum AseError {
    #[error("non-finite feature value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },

    #[error("dimension mismatch: expected {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("imbalance ratio is undefined: dataset has no positive samples")]
    NoPositives,

    #[error("{class} class has {count} samples, at least {required} required")]
    TooFewSamples {
        class: &'static str,
        count: usize,
        required: usize,
    },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("AUC is undefined when only one class is present")]
    SingleClass,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}: line {line}, column {column}: {message}")]
    Csv {
        path: PathBuf,
        line: u64,
        column: String,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("ensemble member {index}: {source}")]
    Member {
        index: usize,
        #[source]
        source: Box<AseError>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl AseError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        AseError::InvalidParameter(msg.into())
    }

    pub(crate) fn in_member(self, index: usize) -> Self {
        AseError::Member {
            index,
            source: Box::new(self),
        }
    }
}
