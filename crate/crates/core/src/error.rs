use thiserror::Error;

/// Failures raised by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// One or more parameter invariants are violated. Every violation is listed.
    #[error("invalid configuration: {}", .0.join("; "))]
    Invalid(Vec<String>),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite {field} at node {node} (t = {t:e})")]
    NonFinite { field: &'static str, node: usize, t: f64 },

    #[error("boundary monitor tripped at t = {t:e}: {field} deviates by {deviation:e} at node {node}")]
    BoundaryTrip {
        t: f64,
        field: &'static str,
        node: usize,
        deviation: f64,
    },

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
