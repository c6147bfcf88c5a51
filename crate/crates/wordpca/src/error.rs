use std::io;

/// Errors from file handling, experiments and the command line.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: expected {expected} values, found {found}")]
    DimensionMismatch { line: usize, expected: usize, found: usize },

    #[error("line {line}: duplicate token")]
    DuplicateToken { line: usize },

    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("line {line}: non-finite value")]
    NonFiniteValue { line: usize },

    #[error("line {line}: malformed number {text:?}")]
    MalformedNumber { line: usize, text: String },

    #[error("truncated input: {0}")]
    TruncatedInput(String),

    #[error("unexpected data after {0} records")]
    TrailingData(usize),

    #[error("token {token:?} cannot be written as {format}")]
    UnencodableToken { token: String, format: &'static str },

    #[error("line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },

    #[error("line {line}: unknown split {split:?}")]
    UnknownSplit { line: usize, split: String },

    #[error("{0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Core(#[from] wordpca_core::Error),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Name of the error kind, printed by the command line.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::DuplicateToken { .. } => "DuplicateToken",
            Error::MalformedHeader(_) => "MalformedHeader",
            Error::NonFiniteValue { .. } => "NonFiniteValue",
            Error::MalformedNumber { .. } => "MalformedNumber",
            Error::TruncatedInput(_) => "TruncatedInput",
            Error::TrailingData(_) => "TrailingData",
            Error::UnencodableToken { .. } => "UnencodableToken",
            Error::MalformedRecord { .. } => "MalformedRecord",
            Error::UnknownSplit { .. } => "UnknownSplit",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Core(e) => e.name(),
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
            Error::Csv(_) => "Csv",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
