//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("malformed input {path}: {detail}")]
    MalformedInput { path: PathBuf, detail: String },

    #[error("row {row}: expected {expected} columns, found {found}")]
    RowWidth {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("value {value} at row {row}, column {col} is outside [0, 1]")]
    ValueOutOfRange { row: usize, col: usize, value: f64 },

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("expected length {expected}, got {got}")]
    WrongLength { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("zero total variance: {0}")]
    ZeroVariance(String),

    #[error("centroids {a} and {b} coincide; between-cluster distance is zero")]
    CoincidentCentroids { a: usize, b: usize },

    #[error("all clusters have zero spread; Dunn's index denominator is zero")]
    ZeroSpread,

    #[error("at least two clusters required, found {0}")]
    SingleCluster(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("k = {k} exceeds sample count n = {n}")]
    KTooLarge { k: usize, n: usize },

    #[error("fold for held-out subject {subject} failed: {source}")]
    Fold {
        subject: u32,
        #[source]
        source: Box<Error>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad user input (CLI maps these to exit 2).
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Config(_))
    }
}
