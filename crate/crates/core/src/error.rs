use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An element id outside `1..=n`.
    #[error("element id {id} is outside the ground set 1..={ground_size}")]
    InvalidElement { id: usize, ground_size: usize },

    #[error("invalid knapsack instance: {0}")]
    InvalidInstance(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An objective broke one of its stated hypotheses while being evaluated.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("ground set of {n} elements exceeds the exhaustive-search limit of {limit}")]
    TooLarge { n: usize, limit: usize },
}
