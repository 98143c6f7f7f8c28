use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dense dimension {requested} exceeds the configured cap {cap}; use the collapsed Grover backend")]
    Capacity { requested: u128, cap: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("operator is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("map is not a bijection: {0}")]
    NotBijective(String),

    #[error("matrix is not a 0/1 permutation matrix: {0}")]
    NotPermutation(String),

    #[error("invalid bit string {value:?}: {reason}")]
    InvalidBits { value: String, reason: String },

    #[error("invalid truth table: {0}")]
    InvalidTable(String),

    #[error("invalid marked set: {0}")]
    InvalidMarkedSet(String),

    #[error("unsupported algorithm: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("iteration count does not fit in 64 bits for n = {0}")]
    IterationOverflow(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
