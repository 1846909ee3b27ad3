use thiserror::Error;

/// Errors raised across the crate.
///
/// `Domain` errors correspond to mathematically meaningful failures (singular
/// loci, invalid parameter branches, solvability obstructions); `Usage`
/// errors are malformed input.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value at index {index} in {context}")]
    NonFinite { context: String, index: usize },

    #[error("solvability obstruction: {0}")]
    Solvability(String),

    #[error("singular locus: {0}")]
    Singular(String),

    #[error("invalid parameter branch: predicate `{predicate}` violated ({detail})")]
    InvalidBranch { predicate: String, detail: String },

    #[error("linearly dependent generators: {0}")]
    DependentGenerators(String),

    #[error("adjoint series does not terminate: {0}")]
    NonTerminating(String),

    #[error("unknown name: {0}")]
    UnknownName(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("solver aborted after step {last_healthy_step}: {reason}")]
    SolverAbort { last_healthy_step: usize, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors that indicate a domain-level failure rather than bad input.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Solvability(_)
                | Error::Singular(_)
                | Error::InvalidBranch { .. }
                | Error::DependentGenerators(_)
                | Error::NonTerminating(_)
                | Error::SolverAbort { .. }
                | Error::NonFinite { .. }
        )
    }

    pub fn branch(predicate: &str, detail: impl Into<String>) -> Self {
        Error::InvalidBranch {
            predicate: predicate.to_string(),
            detail: detail.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
