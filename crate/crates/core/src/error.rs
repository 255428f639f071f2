use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index set would exceed the cardinality cap of {cap} members")]
    CardinalityCap { cap: usize },

    #[error("|I| = {size} exceeds the number of points N = {n}; reconstruction is impossible")]
    ReconstructionImpossible { size: usize, n: usize },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("base mismatch: {0} vs {1}")]
    BaseMismatch(u32, u32),

    #[error("no irreducible polynomial of degree {0} found")]
    NoIrreducible(usize),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
