use thiserror::Error;

use crate::parse::ParseError;
use crate::prime::Prime;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("the zero polynomial has no content or fixed divisor")]
    ZeroPolynomial,
    #[error("denominator must be nonzero")]
    ZeroDenominator,
    #[error("the zero element has no standard form")]
    ZeroConstant,
    #[error("numerator factor {0} must have degree at least 1")]
    ConstantFactor(String),
    #[error("polynomial {0} is not primitive")]
    NotPrimitive(String),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("cannot factor {0}: it has a prime factor beyond the trial-division bound")]
    FactorizationBound(String),
    #[error("prime {prime} does not divide the fixed divisor of the numerator")]
    PrimeDoesNotDivideFixedDivisor { prime: Prime },
    #[error("factor index {index} out of range for {len} factors")]
    FactorIndex { index: usize, len: usize },
    #[error("input is not an element of Int(Z)")]
    NotMember,
    #[error("input is not image-primitive")]
    NotImagePrimitive,
    #[error("constant inputs are handled by integer factorization, not by the graph criteria")]
    ConstantInput,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("search size {size} exceeds the guard {guard}")]
    GuardExceeded { size: u128, guard: u64 },
    #[error("power {n} exceeds the supported maximum {max}")]
    PowerTooLarge { n: u32, max: u32 },
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("internal verification failure: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code for the CLI: 3 for search guards, 2 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::GuardExceeded { .. } | Error::PowerTooLarge { .. } => 3,
            _ => 2,
        }
    }
}
