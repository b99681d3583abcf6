use thiserror::Error;

use crate::model::DocId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("instance is empty")]
    EmptyInstance,
    #[error("recall is undefined for an instance without responsive documents")]
    UndefinedRecall,
    #[error("report does not cover document {0}")]
    IncompleteReport(DocId),
    #[error("duplicate document id {0}")]
    DuplicateId(DocId),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("weight vector must be non-zero")]
    ZeroVector,
    #[error("instance is not linearly separable")]
    NotRealizable,
    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),
    #[error("linear program solver failure: {0}")]
    LpFailure(String),
    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
