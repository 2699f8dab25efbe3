use crate::error::{Error, Result};

/// Objective-evaluation accounting. `used` never exceeds `max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    used: usize,
    max: usize,
}

impl Budget {
    pub fn new(max: usize) -> Result<Self> {
        if max == 0 {
            return Err(Error::config("evaluation budget must be positive"));
        }
        Ok(Self { used: 0, max })
    }

    /// Budget with `used` evaluations already spent; handy for probing the
    /// time-varying coefficients.
    pub fn with_used(max: usize, used: usize) -> Result<Self> {
        let mut b = Self::new(max)?;
        if used > max {
            return Err(Error::config(format!("used {used} exceeds max {max}")));
        }
        b.used = used;
        Ok(b)
    }

    pub fn used(&self) -> usize {
        self.used
    }

    pub fn max(&self) -> usize {
        self.max
    }

    pub fn remaining(&self) -> usize {
        self.max - self.used
    }

    pub fn is_exhausted(&self) -> bool {
        self.used >= self.max
    }

    /// Fraction of the budget consumed, in `[0, 1]`.
    pub fn progress(&self) -> f64 {
        self.used as f64 / self.max as f64
    }

    /// Reserve `n` evaluations at once; all-or-nothing.
    pub fn try_consume(&mut self, n: usize) -> Result<()> {
        if n > self.remaining() {
            return Err(Error::BudgetExhausted {
                requested: n,
                remaining: self.remaining(),
            });
        }
        self.used += n;
        Ok(())
    }
}
