use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no sign change on bracket [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("no convergence after {0} iterations")]
    Convergence(usize),
    #[error("capability exceeded: {0}")]
    Capability(String),
    #[error("grid error: {0}")]
    Grid(String),
    #[error("truncation error: {0}")]
    Truncation(String),
}

impl Error {
    /// True for errors signalling a size or capability limit rather than bad input.
    pub fn is_capability(&self) -> bool {
        matches!(self, Error::Capability(_))
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
