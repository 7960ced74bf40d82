use thiserror::Error;

/// Failures raised by the numerical pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("invalid weight specification: {0}")]
    InvalidSpec(String),

    #[error("invalid precision context: {0}")]
    InvalidPrecision(String),

    #[error("argument outside the domain of {function}: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },

    #[error("weight evaluated at singular point mu[{index}] with negative exponent")]
    SingularPoint { index: usize },

    #[error("precision unreachable in {stage} (reached {reached})")]
    PrecisionUnreachable { stage: &'static str, reached: String },

    #[error("Hankel matrix of size {n} numerically singular (pivot {pivot} not positive)")]
    NumericallySingular { n: usize, pivot: usize },

    #[error("need moments up to index {needed}, table holds up to {available}")]
    Dimension { needed: usize, available: usize },

    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
