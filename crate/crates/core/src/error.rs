use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The moment system for a quadrature rule could not be solved.
    #[error("solver error: {0}")]
    Solver(String),

    /// A named suite, function or format is not known.
    #[error("unknown {kind}: {name}")]
    Unknown { kind: &'static str, name: String },

    /// Malformed textual input (point files, rule files, grid specs).
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
