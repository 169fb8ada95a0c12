use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV parse error: {0}")]
    Csv(#[from] csv::Error),

    #[error("row {row} has {found} fields, header has {expected}")]
    RaggedRow {
        row: usize,
        found: usize,
        expected: usize,
    },

    #[error("label column `{0}` not found")]
    LabelColumnMissing(String),

    #[error("missing value at row {row}, column `{column}`")]
    MissingValue { row: usize, column: String },

    #[error("non-finite value at row {row}, column `{column}`")]
    NonFinite { row: usize, column: String },

    #[error("dataset has {0} rows, need at least 2")]
    TooFewRows(usize),

    #[error("dataset has no feature columns")]
    NoFeatures,

    #[error("fewer than 2 classes in label column")]
    TooFewClasses,

    #[error("duplicate feature name `{0}`")]
    DuplicateFeature(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("code {code} out of range for cardinality {card}")]
    CodeOutOfRange { code: u32, card: usize },

    #[error("{0}")]
    InvalidConfig(String),
}

impl Error {
    /// True for errors caused by invalid parameters rather than bad input data.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::InvalidConfig(_))
    }
}
