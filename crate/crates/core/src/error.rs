use thiserror::Error;

/// Errors raised by the library. Each variant corresponds to one failure class.
#[derive(Debug, Error)]
pub enum Error {
    /// Evaluation point outside the open interval (-1, 1).
    #[error("domain error: {0}")]
    Domain(String),
    /// Caller violated a documented precondition (sizes, ordering, node kind).
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Input data is malformed or not usable (NaN, non-integrable samples).
    #[error("data error: {0}")]
    Data(String),
    /// The requested operation is not available for this weight class.
    #[error("unsupported class: {0}")]
    UnsupportedClass(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
