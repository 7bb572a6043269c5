use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("invalid precision: {0}")]
    InvalidPrecision(String),
    #[error("element is not a unit: constant term {0} is divisible by p")]
    NotAUnit(u64),
    #[error("{what} = {value} is outside {range}")]
    IndexOutOfRange {
        what: &'static str,
        value: i64,
        range: String,
    },
    #[error("p-adic precision N = {p_prec} is too small for m = {m}; need N >= {required}")]
    PrecisionGuard { m: u32, p_prec: u32, required: u32 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operands come from different truncation configurations")]
    ConfigMismatch,
}

pub type Result<T> = std::result::Result<T, Error>;
