use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed shape document: {0}")]
    MalformedShape(String),

    #[error("invalid shape graph: {0}")]
    InvalidShape(String),

    #[error("shape is not bipartite between U and V: {0}")]
    NotBipartite(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} exceeds cap ({size} > {cap})")]
    CapExceeded { what: String, size: u128, cap: u128 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("integer overflow in {0}")]
    Overflow(String),

    #[error("not a U-V separator: {0}")]
    NotASeparator(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn cap_check(what: &str, size: u128, cap: u128) -> Result<()> {
    if size > cap {
        Err(Error::CapExceeded {
            what: what.to_string(),
            size,
            cap,
        })
    } else {
        Ok(())
    }
}
