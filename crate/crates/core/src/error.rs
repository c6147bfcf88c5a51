use alloc::string::String;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("duplicate token at row {row}")]
    DuplicateToken { row: usize },

    #[error("non-finite value at row {row}, column {col}")]
    NonFiniteValue { row: usize, col: usize },

    #[error("embedding set must have at least one row and one column")]
    EmptyEmbeddings,

    #[error("need at least 2 rows, got {rows}")]
    DegenerateInput { rows: usize },

    #[error("eigensolver did not converge")]
    NumericalFailure,

    #[error("invalid component range [{start}, {end}) for dimension {dim}")]
    InvalidRange { start: usize, end: usize, dim: usize },

    #[error("component rank {rank} out of bounds for dimension {dim}")]
    RankOutOfBounds { rank: usize, dim: usize },

    #[error("dimension {dim} is not divisible into three equal bands")]
    NonDivisibleDim { dim: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("input has zero variance")]
    ZeroVariance,

    #[error("need at least 2 evaluable pairs, got {evaluated}")]
    TooFewEvaluablePairs { evaluated: usize },

    #[error("training data contains a single class")]
    SingleClass,

    #[error("non-finite feature at row {row}, column {col}")]
    NonFiniteFeature { row: usize, col: usize },

    #[error("need at least {needed} records, got {found}")]
    TooFewRecords { needed: usize, found: usize },
}

impl Error {
    /// Variant name, as printed by the command line on failure.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::DuplicateToken { .. } => "DuplicateToken",
            Error::NonFiniteValue { .. } => "NonFiniteValue",
            Error::EmptyEmbeddings => "EmptyEmbeddings",
            Error::DegenerateInput { .. } => "DegenerateInput",
            Error::NumericalFailure => "NumericalFailure",
            Error::InvalidRange { .. } => "InvalidRange",
            Error::RankOutOfBounds { .. } => "RankOutOfBounds",
            Error::NonDivisibleDim { .. } => "NonDivisibleDim",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::ZeroVariance => "ZeroVariance",
            Error::TooFewEvaluablePairs { .. } => "TooFewEvaluablePairs",
            Error::SingleClass => "SingleClass",
            Error::NonFiniteFeature { .. } => "NonFiniteFeature",
            Error::TooFewRecords { .. } => "TooFewRecords",
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
