use thiserror::Error;

/// Errors surfaced by the library. Each variant maps onto one CLI exit code
/// class: contract failures, bad configuration, or an exhausted budget.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("group validation failed: {0}")]
    Group(String),
    #[error("test function not admissible: {0}")]
    Admissibility(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("truncation: {0}")]
    Truncation(String),
    #[error("cache error: {0}")]
    Cache(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
