use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("invalid half-integer `{0}`")]
    HalfInt(String),
    #[error("invalid surd expression `{0}`")]
    Surd(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurdError {
    #[error("negative radicand {0}")]
    NegativeRadicand(String),
    #[error("factorial argument {n} exceeds the configured limit {limit}")]
    FactorialLimit { n: u64, limit: u64 },
}
