use thiserror::Error;

/// Errors from the brute-force evaluators.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    /// The input is outside the size the oracle is willing to contract.
    #[error("oracle bound exceeded: {0}")]
    Resource(String),
    #[error("invalid oracle input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, OracleError>;
