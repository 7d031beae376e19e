use std::fmt;

/// Error type shared by all modules.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A precondition on user input failed (bad spacing, empty list, ...).
    Invalid(String),
    /// The requested integral or functional value diverges.
    Divergent(String),
    /// Region/grid/field dimensions do not match.
    DimensionMismatch { expected: usize, got: usize },
    /// An iterative solver did not reach its tolerance within the cap.
    NoConvergence(String),
    /// Configuration file problems (missing key, unparsable value, ...).
    Config(String),
    /// I/O failure, annotated with the path involved.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Invalid(msg) => write!(f, "invalid input: {msg}"),
            Error::Divergent(msg) => write!(f, "divergent quantity: {msg}"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::NoConvergence(msg) => write!(f, "no convergence: {msg}"),
            Error::Config(msg) => write!(f, "config error: {msg}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
