use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("code length {0} is not a power of two >= 2")]
    InvalidLength(usize),

    #[error("index {index} outside [1, {n}]")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("weight {weight} outside [0, {n}]")]
    WeightOutOfRange { weight: usize, n: usize },

    #[error("dimension {k} outside [1, {n}]")]
    DimensionOutOfRange { k: usize, n: usize },

    #[error("information set is not strictly increasing or contains duplicate index {0}")]
    DuplicateIndex(usize),

    #[error("vector length {got} does not match code length {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("frozen position {0} carries a nonzero input bit")]
    NonzeroFrozenBit(usize),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid polynomial {0:?}")]
    InvalidPolynomial(String),

    #[error("polynomial degree {degree} does not match {expected} check bits")]
    DegreeMismatch { degree: usize, expected: usize },

    #[error("{what} = {value} exceeds the enumeration budget of {limit}")]
    BudgetExceeded {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("{0}")]
    InvalidArgument(String),
}
