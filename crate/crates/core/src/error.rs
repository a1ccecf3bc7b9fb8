use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("metric domain error: {0}")]
    MetricDomain(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("invalid vertex id {id} (vertex count {n})")]
    Id { id: u64, n: usize },

    #[error("merge input contains no valid vertices")]
    EmptyInput,

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Param(msg.into())
    }

    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    /// True for errors caused by bad user input (arguments, files), as
    /// opposed to failures inside the library.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Io(e) if e.kind() != std::io::ErrorKind::NotFound)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
