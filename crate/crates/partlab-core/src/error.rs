use alloc::string::String;

use crate::family::FamilyTag;

/// Errors raised by the exact layer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("malformed partition: {0}")]
    MalformedPartition(String),
    #[error("size mismatch: {left} vs {right} columns")]
    SizeMismatch { left: usize, right: usize },
    #[error("{what} cap exceeded: {value} > {cap}")]
    Capacity {
        what: &'static str,
        value: u128,
        cap: u128,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("singular Gram matrix: N = {n} too small for family {family} at k = {k}")]
    SingularGram { n: u64, k: usize, family: FamilyTag },
    #[error("missing entry: {0}")]
    MissingEntry(String),
    #[error("tolerance {tolerance:e} not reached within {iterations} iterations")]
    NoConvergence { tolerance: f64, iterations: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = core::result::Result<T, Error>;
