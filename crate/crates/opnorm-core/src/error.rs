use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value that violates an operation's domain: negative entries where a
    /// nonnegative matrix is required, zero vectors, non-finite input, and so on.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An exponent pair outside the range an operation supports.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A malformed matrix or graph file.
    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    /// A requested construction would exceed the configured dimension cap.
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn format(line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            line,
            message: message.into(),
        }
    }
}
