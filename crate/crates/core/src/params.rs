use serde::{Deserialize, Serialize};

use crate::chain::ChainState;
use crate::error::{Error, Result};

/// Population size, failure budget and number of initially informed
/// individuals.
///
/// Each initial infective contributes `k` infection attempts, so the chain
/// starts at `S = n - m`, `I = k * m`, `t = 0` for `m` initial infectives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelParams {
    n: u64,
    k: u64,
    initial_infectives: u64,
}

impl ModelParams {
    /// Single initial infective, the configuration covered by the limit theorem.
    pub fn new(n: u64, k: u64) -> Result<Self> {
        Self::with_initial_infectives(n, k, 1)
    }

    pub fn with_initial_infectives(n: u64, k: u64, initial_infectives: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("population size n must be at least 1"));
        }
        if k == 0 {
            return Err(Error::param("failure budget k must be at least 1"));
        }
        if initial_infectives == 0 || initial_infectives > n {
            return Err(Error::param(format!(
                "initial infectives must lie in 1..={n}, got {initial_infectives}"
            )));
        }
        // (k+1) * n must fit comfortably so that T and the conserved sum never overflow.
        if (k + 1).checked_mul(n).and_then(|v| v.checked_mul(4)).is_none() {
            return Err(Error::param("(k+1)*n overflows 64-bit arithmetic"));
        }
        Ok(Self { n, k, initial_infectives })
    }

    #[inline]
    pub fn n(&self) -> u64 {
        self.n
    }

    #[inline]
    pub fn k(&self) -> u64 {
        self.k
    }

    #[inline]
    pub fn initial_infectives(&self) -> u64 {
        self.initial_infectives
    }

    /// Initial susceptible count `S_0`.
    #[inline]
    pub fn s0(&self) -> u64 {
        self.n - self.initial_infectives
    }

    /// Initial attempt counter `I_0`.
    #[inline]
    pub fn i0(&self) -> u64 {
        self.k * self.initial_infectives
    }

    pub fn initial_state(&self) -> ChainState {
        ChainState { s: self.s0(), i: self.i0(), t: 0 }
    }

    /// Value of `(k+1) S + I + t` shared by every reachable state.
    #[inline]
    pub fn conserved_total(&self) -> u64 {
        (self.k + 1) * self.s0() + self.i0()
    }

    /// Upper bound on the terminal time.
    #[inline]
    pub fn max_terminal_time(&self) -> u64 {
        (self.k + 1) * self.n
    }

    pub(crate) fn require_single_infective(&self, what: &str) -> Result<()> {
        if self.initial_infectives != 1 {
            return Err(Error::param(format!(
                "{what} assumes a single initial infective, got {}",
                self.initial_infectives
            )));
        }
        Ok(())
    }
}
