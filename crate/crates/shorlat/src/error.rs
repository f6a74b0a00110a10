use num_bigint::BigInt;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{a} is not a unit modulo {n}")]
    NotAUnit { a: BigInt, n: BigInt },

    #[error("order search exceeded its budget of {budget} iterations")]
    OrderBudgetExceeded { budget: u64 },

    #[error("reference vector must be nonzero")]
    ZeroVector,

    #[error("basis vectors are linearly dependent")]
    DegenerateLattice,

    #[error("enumeration exceeded the cell budget of {budget}")]
    TooLarge { budget: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: BigInt },

    #[error("N = {given} is below the required minimum {min}")]
    InvalidN { given: BigInt, min: BigInt },

    #[error("shortest vector has a leading coordinate that is not a multiple of N")]
    NotNMultiple,

    #[error("cannot estimate the period from a zero sample")]
    DivisionByZero,
}
