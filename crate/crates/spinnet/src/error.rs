use surd::{HalfInt, ParseError, SurdError};
use thiserror::Error;

/// Errors raised by the evaluators and the verifier.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpinError {
    /// A projection `m` does not match the parity of its `j`, or `|m| > j`.
    #[error("projection {m} is not valid for spin {j}")]
    Projection { j: HalfInt, m: HalfInt },
    #[error("negative spin {0}")]
    NegativeSpin(HalfInt),
    #[error("bracket rows must have equal length n >= 3 (got top {top}, mid {mid}, bottom {bottom})")]
    RowLength { top: usize, mid: usize, bottom: usize },
    #[error("triangle condition {{{0}, {1}, {2}}} fails")]
    Triad(HalfInt, HalfInt, HalfInt),
    #[error("assignment has no spin for `{0}`")]
    MissingEdge(String),
    #[error("unknown edge label `{0}`")]
    UnknownEdge(String),
    #[error("loop `{loop_name}` lives on the {expected} lattice, not on {got}")]
    LatticeMismatch { loop_name: String, expected: String, got: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Surd(#[from] SurdError),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for SpinError {
    fn from(e: std::io::Error) -> Self {
        SpinError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, SpinError>;
