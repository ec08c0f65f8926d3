use thiserror::Error;

/// Errors returned by parameter validation and the classical subroutines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("factorization of {0} did not finish within the iteration limit")]
    FactorizationTimeout(String),
    #[error("modulus {0} is even")]
    EvenModulus(String),
    #[error("modulus {0} is prime")]
    PrimeModulus(String),
    #[error("modulus {0} is a perfect power {1}^{2}")]
    PerfectPower(String, String, u32),
    #[error("order recovery failed: {0}")]
    RecoveryFailed(String),
    #[error("factorization incomplete after {iterations} iterations: {factors:?}")]
    IncompleteFactorization {
        iterations: u32,
        factors: Vec<String>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
