use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u32, right: u32 },

    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u64),

    #[error("determinant {det} is not invertible mod {m}")]
    NotInvertible { det: u32, m: u32 },

    #[error("determinant class {d} is not coprime to {m}")]
    DetNotCoprime { d: u32, m: u32 },

    #[error("enumeration of modulus {m} exceeds the exhaustive cap {cap}")]
    ModulusTooLarge { m: u32, cap: u32 },

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("invalid rational input: {0}")]
    InvalidRational(String),

    #[error("partial quotient does not fit in 64 bits")]
    QuotientOverflow,

    #[error("need {need} trusted partial quotients, have {have}")]
    InsufficientQuotients { have: usize, need: usize },

    #[error("enumeration needs {required} cylinders, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
