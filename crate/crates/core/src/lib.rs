//! Selection functions, their products, and the family of bar-recursive
//! combinators built from them, over finite ground types.

pub mod barrec;
pub mod error;
pub mod fuel;
pub mod harness;
pub mod interdef;
pub mod selection;
pub mod seqcore;
pub mod spector;

pub use error::{EvalError, EvalResult};
pub use fuel::{Fuel, DEFAULT_FUEL};
pub use seqcore::{Ground, Outcome, OutcomeFn, Path, Seq, Value};
