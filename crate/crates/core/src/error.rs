use thiserror::Error;

/// Errors raised by the lattice, operator, sequence and probe layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid sphere spec: {0}")]
    InvalidSpec(String),

    #[error("{what}: predicted size {needed} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        needed: u128,
        cap: u128,
    },

    #[error("{what}: estimated {needed} work units exceeds budget {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        budget: u128,
    },

    #[error("dimension {0} is too small, operators require d >= 4")]
    DimensionTooSmall(usize),

    #[error("sequence is empty")]
    EmptySequence,

    #[error("invalid exponent {0}, need p >= 1")]
    InvalidExponent(f64),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid dimension value: {0}")]
    InvalidDimensionValue(String),

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("inconsistent results: {0}")]
    Inconsistent(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::CapExceeded { .. } => "CapExceeded",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::DimensionTooSmall(_) => "DimensionTooSmall",
            Error::EmptySequence => "EmptySequence",
            Error::InvalidExponent(_) => "InvalidExponent",
            Error::NotPrime(_) => "NotPrime",
            Error::InvalidParams(_) => "InvalidParams",
            Error::InsufficientData(_) => "InsufficientData",
            Error::InvalidDimensionValue(_) => "InvalidDimensionValue",
            Error::Overflow(_) => "Overflow",
            Error::Parse(_) => "ParseError",
            Error::Inconsistent(_) => "Inconsistent",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
