use thiserror::Error;

/// Crate-wide error type. Variants mirror the failure vocabulary used across
/// modules: bad arguments, structurally unusable graphs, exhausted sampling
/// budgets, blown capacity caps, and parameter regimes where a statistic is
/// simply not defined.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("sampling failure: {0}")]
    SamplingFailure(String),

    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),

    /// The model assumptions (regularity, minimum degree, ...) rule the input out.
    #[error("out of model: {0}")]
    OutOfModel(String),

    /// The asymptotic regime a formula lives in does not contain the input.
    #[error("out of regime: {0}")]
    OutOfRegime(String),

    #[error("horizon too short: need return probabilities up to {needed}, have {have}")]
    HorizonTooShort { needed: usize, have: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("assertion failed: {0}")]
    AssertionFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
