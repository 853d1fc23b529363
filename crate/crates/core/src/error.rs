use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A single input record is malformed. `line` is 1-based.
    #[error("line {line}: {message}")]
    Record { line: usize, message: String },

    #[error("corpus error: {0}")]
    Corpus(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("feature kind mismatch: model expects {expected} vectors, got {got}")]
    FeatureKindMismatch { expected: &'static str, got: &'static str },

    /// Non-finite loss during iterative training.
    #[error("training diverged: {0}")]
    Diverged(String),

    #[error("model file format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by the caller's configuration rather than data.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_))
    }
}
