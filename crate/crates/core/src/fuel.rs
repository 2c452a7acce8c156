use std::cell::Cell;
use std::fmt;
use std::rc::Rc;

use crate::error::{EvalError, EvalResult};

/// Default number of recursor unfoldings granted to one evaluation.
pub const DEFAULT_FUEL: u64 = 100_000;

const STACK_RED_ZONE: usize = 256 * 1024;
const STACK_SEGMENT: usize = 16 * 1024 * 1024;

/// Unfolding budget shared by every closure taking part in one evaluation.
///
/// Clones share the same counter. Each recursor unfolding consumes one unit;
/// when the counter reaches zero the evaluation aborts with
/// [`EvalError::FuelExhausted`].
#[derive(Clone)]
pub struct Fuel(Rc<FuelState>);

struct FuelState {
    budget: u64,
    remaining: Cell<u64>,
}

impl Fuel {
    pub fn new(budget: u64) -> Self {
        Fuel(Rc::new(FuelState {
            budget,
            remaining: Cell::new(budget),
        }))
    }

    pub fn budget(&self) -> u64 {
        self.0.budget
    }

    pub fn remaining(&self) -> u64 {
        self.0.remaining.get()
    }

    pub fn used(&self) -> u64 {
        self.0.budget - self.0.remaining.get()
    }

    /// Consumes one unit of fuel.
    pub fn tick(&self) -> EvalResult<()> {
        let left = self.0.remaining.get();
        if left == 0 {
            return Err(EvalError::FuelExhausted {
                spent: self.0.budget,
            });
        }
        self.0.remaining.set(left - 1);
        Ok(())
    }

    /// Consumes one unit and runs `body` with enough stack for deep unfoldings.
    pub fn unfold<R>(&self, body: impl FnOnce() -> EvalResult<R>) -> EvalResult<R> {
        self.tick()?;
        with_stack(body)
    }
}

impl Default for Fuel {
    fn default() -> Self {
        Fuel::new(DEFAULT_FUEL)
    }
}

impl fmt::Debug for Fuel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fuel")
            .field("budget", &self.budget())
            .field("remaining", &self.remaining())
            .finish()
    }
}

/// Runs `body`, growing the stack on the heap first if it is nearly exhausted.
pub(crate) fn with_stack<R>(body: impl FnOnce() -> R) -> R {
    stacker::maybe_grow(STACK_RED_ZONE, STACK_SEGMENT, body)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_budget_fails_on_first_tick() {
        let fuel = Fuel::new(0);
        assert_eq!(fuel.tick(), Err(EvalError::FuelExhausted { spent: 0 }));
    }

    #[test]
    fn clones_share_counter() {
        let fuel = Fuel::new(3);
        let other = fuel.clone();
        fuel.tick().unwrap();
        other.tick().unwrap();
        assert_eq!(fuel.used(), 2);
        assert_eq!(other.remaining(), 1);
    }
}
