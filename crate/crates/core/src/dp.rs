//! Exact law of the terminal susceptible count for small populations.
//!
//! By conservation, `t` is a function of `(s, i)`, so the pair is a sufficient
//! state. Mass is pushed forward row by row in decreasing `s`: from `(s, i)`
//! a fraction `s/n` moves to `(s-1, i+k)` and the rest to `(s, i-1)`. Mass
//! reaching `i = 0` is absorbed.

use serde::Serialize;

use crate::chain::Outcome;
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Upper limit on `(n+1)(kn+k+1)` grid cells.
pub const MAX_DP_STATES: u128 = 10_000_000;

#[derive(Debug, Clone, Serialize)]
pub struct TerminalDistribution {
    pub params: ModelParams,
    /// Attainable terminal susceptible counts, ascending.
    pub support: Vec<u64>,
    pub mass: Vec<f64>,
    /// `|sum(mass) - 1|`, reported rather than renormalised away.
    pub mass_drift: f64,
}

impl TerminalDistribution {
    pub fn probability(&self, s_terminal: u64) -> f64 {
        match self.support.binary_search(&s_terminal) {
            Ok(idx) => self.mass[idx],
            Err(_) => 0.0,
        }
    }

    /// Joint law of `(T, S_T)`; `T` is determined by `S_T`.
    pub fn outcomes(&self) -> impl Iterator<Item = (Outcome, f64)> + '_ {
        self.support
            .iter()
            .zip(&self.mass)
            .map(|(&s, &m)| (Outcome::from_terminal_susceptibles(&self.params, s), m))
    }

    pub fn expectation(&self, f: impl Fn(&Outcome) -> f64) -> f64 {
        self.outcomes().map(|(o, m)| m * f(&o)).sum()
    }

    pub fn mean_fraction(&self) -> f64 {
        let n = self.params.n();
        self.expectation(|o| o.fraction(n))
    }
}

pub fn dp_state_count(params: &ModelParams) -> u128 {
    let (n, k) = (params.n() as u128, params.k() as u128);
    (n + 1) * (k * n + k + 1)
}

pub fn terminal_distribution_dp(params: &ModelParams) -> Result<TerminalDistribution> {
    let states = dp_state_count(params);
    if states > MAX_DP_STATES {
        return Err(Error::StateSpaceTooLarge { states, limit: MAX_DP_STATES });
    }
    let n = params.n();
    let k = params.k() as usize;
    let s0 = params.s0();
    let i_max = (params.k() * n) as usize;

    let mut row = vec![0.0f64; i_max + 1];
    row[params.i0() as usize] = 1.0;
    let mut absorbed = vec![0.0f64; s0 as usize + 1];

    for s in (0..=s0).rev() {
        let p = s as f64 / n as f64;
        let mut below = vec![0.0f64; i_max + 1];
        for i in (1..=i_max).rev() {
            let m = row[i];
            if m == 0.0 {
                continue;
            }
            if s > 0 {
                below[i + k] += m * p;
            }
            row[i - 1] += m * (1.0 - p);
        }
        absorbed[s as usize] = row[0];
        row = below;
    }

    let total: f64 = absorbed.iter().sum();
    let (support, mass): (Vec<u64>, Vec<f64>) = absorbed
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > 0.0)
        .map(|(s, &m)| (s as u64, m))
        .unzip();
    Ok(TerminalDistribution { params: *params, support, mass, mass_drift: (total - 1.0).abs() })
}
