use thiserror::Error;

/// Errors raised by the group backends, graph constructions and file loaders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("backend mismatch: {0}")]
    BackendMismatch(String),

    #[error("resource cap exceeded: {what} would exceed {cap}")]
    ResourceCap { what: String, cap: usize },

    /// The answer depends on elements or vertices outside the enumerated window.
    #[error("window exceeded: {0}")]
    WindowExceeded(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Malformed specification file or argument.
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// True for failures caused by window truncation rather than bad input.
    pub fn is_window_exceeded(&self) -> bool {
        matches!(self, Error::WindowExceeded(_))
    }
}
