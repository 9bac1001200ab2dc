use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Two functions (or a function and a space) do not live on the same measure space.
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("invalid measure space: {0}")]
    InvalidSpace(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A documented precondition of an operation does not hold for the given inputs.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Exact arithmetic was requested but the exponent is not an integer.
    #[error("exponent {0} is not an integer; exact arithmetic unavailable")]
    InexactExponent(f64),

    #[error("matrix is singular")]
    Singular,

    #[error("unsupported type for this check: {0}")]
    UnsupportedType(String),

    #[error("syntax error at offset {pos}: {message}")]
    Syntax { pos: usize, message: String },

    #[error("type error: {0}")]
    Type(String),

    #[error("malformed document: {0}")]
    Schema(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Schema(e.to_string())
    }
}
