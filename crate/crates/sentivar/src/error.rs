//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed CSV content; `line` is 1-based and counts the header.
    #[error("{path}: line {line}: {message}")]
    Csv {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// A precondition or domain invariant was violated.
    #[error("{0}")]
    Invalid(String),

    /// A regression design matrix is rank deficient.
    #[error("collinear regressors: {}", columns.join(", "))]
    Collinear { columns: Vec<String> },

    /// A matrix that must be positive definite failed its factorization.
    #[error("singular or indefinite matrix in {context}")]
    Singular { context: String },

    /// A Gibbs block failed mid-run.
    #[error("mcmc aborted at iteration {iteration} in block '{block}': {source}")]
    Mcmc {
        iteration: usize,
        block: &'static str,
        #[source]
        source: Box<Error>,
    },

    /// Configuration problems, all reported at once.
    #[error("invalid configuration:\n{}", issues.iter().map(|s| format!("  - {s}")).collect::<Vec<_>>().join("\n"))]
    Config { issues: Vec<String> },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn csv(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Csv {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
