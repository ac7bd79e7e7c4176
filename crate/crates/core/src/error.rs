use thiserror::Error;

/// Errors raised by the library. Each variant maps onto one failure class so
/// callers (notably the CLI) can pick an exit code without string matching.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A stated precondition of a bound or construction is not met.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Requested work exceeds a configured size cap.
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    /// A numerical routine failed to reach its tolerance.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// An internal consistency check failed. Indicates a bug.
    #[error("invariant violated: {0}")]
    Invariant(String),
    /// Malformed serialized input.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Precondition(_) => "precondition",
            Error::Resource(_) => "resource",
            Error::Numerical(_) => "numerical",
            Error::Invariant(_) => "invariant",
            Error::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! domain {
    ($($arg:tt)*) => { $crate::error::Error::Domain(format!($($arg)*)) };
}
macro_rules! precondition {
    ($($arg:tt)*) => { $crate::error::Error::Precondition(format!($($arg)*)) };
}
pub(crate) use domain;
pub(crate) use precondition;
