use thiserror::Error;

/// Failure modes shared by every recursor and search routine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    /// The unfolding budget ran out. Either the computation diverges or the
    /// budget is too small for the instance.
    #[error("fuel exhausted after {spent} unfoldings")]
    FuelExhausted { spent: u64 },
    /// The bounded search for a stopping point found none.
    #[error("search failed: {0}")]
    SearchFailed(String),
    /// An input broke a declared contract (modulus, bound, arity).
    #[error("contract violation: {0}")]
    ContractViolation(String),
}

pub type EvalResult<T> = Result<T, EvalError>;
