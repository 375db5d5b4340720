use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("field mismatch: expected {expected}, found an entry from {found}")]
    FieldMismatch { expected: String, found: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("subspace is not contained in the ambient span")]
    NotContained,
    #[error("window error: {0}")]
    Window(String),
    #[error("invalid presentation: {0}")]
    Validation(String),
    #[error("degenerate window: {0}")]
    DegenerateWindow(String),
    #[error("unsupported operand: {0}")]
    Unsupported(String),
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),
    #[error("truncation impossible: {0}")]
    TruncationImpossible(String),
    #[error("invalid automorphism: {0}")]
    Automorphism(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
}

pub type Result<T> = std::result::Result<T, Error>;
