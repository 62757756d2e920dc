use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The operation was invoked on the wrong kind of object, e.g. a pairing
    /// query on a ground set without pairs.
    #[error("usage error: {0}")]
    Usage(String),

    /// The request is well-formed but exceeds what the chosen strategy can handle.
    #[error("capacity error: {0}")]
    Capacity(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Malformed structure, such as an image table of the wrong length.
    #[error("structural error: {0}")]
    Structural(String),

    /// The naive oracle and the pruned engine disagreed. Always a bug.
    #[error("oracle disagreement: {0}")]
    OracleDisagreement(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
