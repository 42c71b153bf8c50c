use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    /// The problem data is inconsistent (dimensions, indices, non-finite data).
    #[error("malformed problem: {0}")]
    Malformed(String),

    /// The backend does not support this problem class.
    #[error("backend `{backend}` does not support {class} problems")]
    Unsupported { backend: String, class: &'static str },

    /// Numerical breakdown the solver could not recover from.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, SolverError>;
