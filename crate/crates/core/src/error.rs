use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input document. `row` is the 1-based data row (the header is row 0).
    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("unknown {kind} `{label}`")]
    UnknownLabel { kind: &'static str, label: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(row: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            row,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid(message.into())
    }
}
