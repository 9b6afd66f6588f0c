use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid tree decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("degree set must not be empty")]
    EmptySet,

    #[error("pair is trivial; use the closed-form shortcut")]
    TrivialPair,

    #[error("state index {index} out of range (top {top})")]
    StateOutOfRange { index: usize, top: usize },

    #[error("string length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("instance has {n} vertices, oracle guard is {limit}")]
    SizeGuard { n: usize, limit: usize },

    #[error("algorithm not applicable: {0}")]
    NotApplicable(String),

    #[error("prime search failed: {0}")]
    PrimeSearch(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
