use alloc::string::String;

/// Everything that can go wrong while building or evaluating an estimator.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty sample")]
    EmptySample,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("functional expects {expected} sample(s), got {got}")]
    Arity { expected: usize, got: usize },
    #[error("insufficient sample size: n = {n}, order needs n >= {min}")]
    InsufficientSample { n: usize, min: usize },
    #[error("degenerate sample: {0}")]
    Degenerate(&'static str),
    #[error("singular point: {0}")]
    Singular(&'static str),
    #[error("unsupported order: {0}")]
    UnsupportedOrder(String),
    #[error("moment table holds order {have}, need {need}")]
    MomentOrder { have: usize, need: usize },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("finite-difference check failed: {0}")]
    Unstable(String),
    #[error("exact arithmetic cannot represent {0}")]
    Inexact(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
