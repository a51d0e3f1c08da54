use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Monotone count of objective evaluations against a hard maximum.
///
/// Batched phases call [`EvaluationBudget::reserve`] up front; a phase that
/// does not fit is refused as a whole, so `used <= max` always holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluationBudget {
    used: u64,
    max: u64,
}

impl EvaluationBudget {
    pub fn new(max: u64) -> Result<Self> {
        if max == 0 {
            return Err(Error::parameter("budget_max", "must be positive"));
        }
        Ok(Self { used: 0, max })
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn max(&self) -> u64 {
        self.max
    }

    pub fn remaining(&self) -> u64 {
        self.max - self.used
    }

    pub fn is_exhausted(&self) -> bool {
        self.used >= self.max
    }

    /// Fraction of the budget consumed, in `[0, 1]`.
    pub fn progress(&self) -> f64 {
        self.used as f64 / self.max as f64
    }

    /// Fails without side effects unless `n` more evaluations fit.
    pub fn reserve(&self, n: u64) -> Result<()> {
        if n > self.remaining() {
            return Err(Error::BudgetExhausted {
                used: self.used,
                max: self.max,
                requested: n,
            });
        }
        Ok(())
    }

    /// Counts one evaluation.
    pub fn charge(&mut self) -> Result<()> {
        self.reserve(1)?;
        self.used += 1;
        Ok(())
    }
}
