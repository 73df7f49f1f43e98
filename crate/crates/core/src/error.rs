use thiserror::Error;

use crate::scalar::FieldTag;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("field mismatch: expected {expected}, found {found}")]
    FieldMismatch { expected: FieldTag, found: FieldTag },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported field: {0}")]
    UnsupportedField(String),

    #[error("missing data: {0}")]
    MissingData(String),

    #[error("{0}")]
    Parse(#[from] ParseError),
}

/// A malformed instance or report document. Always names the offending key.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("missing field: {0}")]
    MissingField(&'static str),

    #[error("invalid field: {key}: {reason}")]
    InvalidField { key: &'static str, reason: String },

    #[error("malformed document: {0}")]
    Syntax(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
