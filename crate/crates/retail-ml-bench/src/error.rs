//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{file}:{line}: malformed row: {message}")]
    MalformedRow {
        file: String,
        line: usize,
        message: String,
    },

    #[error("{file}:{line}: referential integrity violation: {message}")]
    Integrity {
        file: String,
        line: usize,
        message: String,
    },

    #[error("empty vocabulary: no term survived min_df/max_terms filtering")]
    EmptyVocabulary,

    #[error("k = {k} exceeds number of points n = {n}")]
    KExceedsSamples { k: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("training data contains a single class; need at least 2")]
    SingleClass,

    #[error("negative feature value {value} at row {row}, column {col}")]
    NegativeFeature { row: usize, col: usize, value: f64 },

    #[error("min_support must lie in (0, 1], got {0}")]
    MinSupportOutOfRange(f64),

    #[error("transaction database has {n_items} items; oracle supports at most {limit}")]
    TooManyItems { n_items: usize, limit: usize },

    #[error("rule generation: itemset list is missing subset {0:?}")]
    MissingSubset(Vec<usize>),

    #[error("token index {index} out of range for vocabulary of size {vocab_size}")]
    TokenOutOfRange { index: usize, vocab_size: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid workload spec: {0}")]
    InvalidSpec(String),

    #[error("invalid parameter {key}: {message}")]
    InvalidParam { key: String, message: String },

    #[error("label preparation produced fewer than 2 distinct labels")]
    DegenerateLabels,

    #[error("a class is absent from the training split")]
    ClassAbsentFromTraining,

    #[error("no customers qualify for the feature table")]
    NoQualifyingCustomers,
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
