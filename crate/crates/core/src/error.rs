use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("argument outside the domain of {function}: {reason}")]
    Domain { function: &'static str, reason: String },

    #[error("{0} requires a continuous distribution with a density")]
    NotContinuous(&'static str),

    #[error("evaluation grid does not cover the support: {0}")]
    GridCoverage(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("precondition not met: {0}")]
    Unclassified(String),

    #[error("empty sample")]
    EmptySample,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
