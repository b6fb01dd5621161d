use serde::{Deserialize, Serialize};

use crate::combin::binomial_capped;
use crate::error::{Error, Result};

/// Generative parameters for one experiment: population size `n`, test count
/// `t`, defective count `d`, matrix one-density `p`, erasure probability `q`,
/// sample count `s`, and the root RNG seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: usize,
    pub t: usize,
    pub d: usize,
    pub p: f64,
    pub q: f64,
    pub s: usize,
    pub seed: u64,
}

impl ModelParams {
    /// Check the structural invariants. `s > C(n, d)` is rejected rather than
    /// clamped; silent clamping would skew expectation validation downstream.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.t == 0 {
            return Err(Error::DomainError("n and t must be positive".into()));
        }
        if self.d == 0 || self.d > self.n {
            return Err(Error::DomainError(format!(
                "d must satisfy 1 <= d <= n; got d={}, n={}",
                self.d, self.n
            )));
        }
        for (name, v) in [("p", self.p), ("q", self.q)] {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(Error::DomainError(format!("{name}={v} outside [0, 1]")));
            }
        }
        if self.s == 0 {
            return Err(Error::DomainError("s must be positive".into()));
        }
        let universe = binomial_capped(self.n as u64, self.d as u64, u128::from(u64::MAX));
        if (self.s as u128) > universe {
            return Err(Error::InsufficientUniverse {
                requested: self.s as u64,
                universe: universe.min(u128::from(u64::MAX)) as u64,
            });
        }
        Ok(())
    }

    /// True when both probabilities lie strictly inside (0, 1), the regime the
    /// closed-form analysis assumes. Endpoint values are still accepted for
    /// degenerate tests.
    pub fn in_open_regime(&self) -> bool {
        self.p > 0.0 && self.p < 1.0 && self.q > 0.0 && self.q < 1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ModelParams {
        ModelParams {
            n: 10,
            t: 5,
            d: 2,
            p: 0.3,
            q: 0.2,
            s: 3,
            seed: 1,
        }
    }

    #[test]
    fn accepts_valid_params() {
        base().validate().unwrap();
        assert!(base().in_open_regime());
    }

    #[test]
    fn rejects_oversized_sample_count() {
        let mut p = base();
        p.s = 46; // C(10,2) = 45
        assert!(matches!(
            p.validate(),
            Err(Error::InsufficientUniverse { .. })
        ));
    }

    #[test]
    fn rejects_bad_d_and_probabilities() {
        let mut p = base();
        p.d = 0;
        assert!(p.validate().is_err());
        let mut p = base();
        p.d = 11;
        assert!(p.validate().is_err());
        let mut p = base();
        p.p = 1.5;
        assert!(p.validate().is_err());
    }

    #[test]
    fn endpoints_leave_open_regime() {
        let mut p = base();
        p.q = 0.0;
        p.validate().unwrap();
        assert!(!p.in_open_regime());
    }
}
