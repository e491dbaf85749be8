use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum ClmError {
    #[error("matrix is not a symplectic similitude: {0}")]
    NotSimilitude(String),
    #[error("enumeration budget exceeded: {needed} candidates, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("oracle bound exceeded: group order {order} above bound {bound}")]
    BoundExceeded { order: u128, bound: u128 },
    #[error("no closed form for xi = {0}; only xi in {{1, 2}} is supported")]
    UnsupportedXi(u32),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, ClmError>;
