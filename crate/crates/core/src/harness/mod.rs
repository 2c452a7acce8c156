//! Instances, checks, demos and reports behind the `selrec` command.

pub mod check;
pub mod demo;
pub mod instance;
pub mod props;
pub mod random;
pub mod suite;

use thiserror::Error;

use crate::error::EvalError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid field `{field}`: {message}")]
    Validation { field: String, message: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}
