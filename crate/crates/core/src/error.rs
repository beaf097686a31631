use thiserror::Error;

/// Errors raised by the arithmetic modules.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("divisor does not divide dividend exactly")]
    NonDivisible,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cannot factor {0}: cofactor exceeds the trial-division range")]
    FactorLimit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
