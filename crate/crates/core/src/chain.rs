//! The aggregated Markov chain `(S_t, I_t)` of susceptibles and remaining
//! infection attempts.
//!
//! While `I_t > 0`, one attempt is made per step. It succeeds with probability
//! `S_t / n` (contacts are uniform over the whole population, the initiator
//! included), moving to `(S_t - 1, I_t + k)`; otherwise it fails and the chain
//! moves to `(S_t, I_t - 1)`. The quantity `(k+1) S_t + I_t + t` never changes.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::rng::UniformSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChainState {
    /// Susceptibles.
    pub s: u64,
    /// Infection attempts still available across all infectives.
    pub i: u64,
    /// Steps taken so far.
    pub t: u64,
}

impl ChainState {
    pub fn is_terminal(&self) -> bool {
        self.i == 0
    }
}

/// Terminal time and terminal susceptible count of one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Outcome {
    pub terminal_time: u64,
    pub terminal_susceptibles: u64,
}

impl Outcome {
    /// Builds the outcome implied by a terminal susceptible count, using the
    /// conservation law with `I_T = 0`.
    pub fn from_terminal_susceptibles(params: &ModelParams, s_terminal: u64) -> Self {
        Self {
            terminal_time: params.conserved_total() - (params.k() + 1) * s_terminal,
            terminal_susceptibles: s_terminal,
        }
    }

    pub fn fraction(&self, n: u64) -> f64 {
        self.terminal_susceptibles as f64 / n as f64
    }

    pub fn time_over_n(&self, n: u64) -> f64 {
        self.terminal_time as f64 / n as f64
    }

    /// Checks the structural identities every terminal pair must satisfy.
    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        let (n, k) = (params.n(), params.k());
        let (t, s) = (self.terminal_time, self.terminal_susceptibles);
        let fail = |what: &str| Err(Error::InvariantViolation(format!("{what}: {self:?} for n={n}, k={k}")));
        if s > params.s0() {
            return fail("terminal susceptibles exceed the initial count");
        }
        if t > params.max_terminal_time() {
            return fail("terminal time exceeds (k+1)n");
        }
        if (k + 1) * s + t != params.conserved_total() {
            return fail("conservation law broken at termination");
        }
        if params.initial_infectives() == 1 {
            if (t + 1) % (k + 1) != 0 {
                return fail("(T+1) is not a multiple of k+1");
            }
            if s != n - (t + 1) / (k + 1) {
                return fail("S_T differs from n - (T+1)/(k+1)");
            }
            if t < k {
                return fail("terminated before k steps");
            }
        }
        Ok(())
    }
}

/// Optional record of visited states. With a capacity only the most recent
/// states are retained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<S> {
    capacity: Option<usize>,
    states: VecDeque<S>,
}

impl<S> Trajectory<S> {
    pub fn unbounded() -> Self {
        Self { capacity: None, states: VecDeque::new() }
    }

    pub fn with_capacity(capacity: usize) -> Self {
        assert!(capacity > 0, "trajectory capacity must be positive");
        Self { capacity: Some(capacity), states: VecDeque::with_capacity(capacity) }
    }

    pub fn push(&mut self, state: S) {
        if let Some(cap) = self.capacity {
            if self.states.len() == cap {
                self.states.pop_front();
            }
        }
        self.states.push_back(state);
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &S> {
        self.states.iter()
    }

    pub fn to_vec(&self) -> Vec<S>
    where
        S: Clone,
    {
        self.states.iter().cloned().collect()
    }
}

/// `(k+1) s + i + t`.
#[inline]
pub fn conserved_quantity(state: &ChainState, k: u64) -> u64 {
    (k + 1) * state.s + state.i + state.t
}

/// The success branch shared by the chain and the coupled walk.
#[inline]
pub(crate) fn contact_hits_susceptible(u: f64, s: u64, n: u64) -> bool {
    u < s as f64 / n as f64
}

/// Advances the chain by one attempt driven by the uniform `u`.
pub fn step_exact(state: ChainState, params: &ModelParams, u: f64) -> Result<ChainState> {
    if state.i == 0 {
        return Err(Error::Terminated);
    }
    let next = if contact_hits_susceptible(u, state.s, params.n()) {
        ChainState { s: state.s - 1, i: state.i + params.k(), t: state.t + 1 }
    } else {
        ChainState { s: state.s, i: state.i - 1, t: state.t + 1 }
    };
    Ok(next)
}

fn run_exact_inner<S: UniformSource + ?Sized>(
    params: &ModelParams,
    src: &mut S,
    mut trace: Option<&mut Trajectory<ChainState>>,
) -> Result<Outcome> {
    let k = params.k();
    let total = params.conserved_total();
    let mut state = params.initial_state();
    if let Some(tr) = trace.as_deref_mut() {
        tr.push(state);
    }
    while state.i > 0 {
        state = step_exact(state, params, src.next_uniform())?;
        if conserved_quantity(&state, k) != total {
            return Err(Error::InvariantViolation(format!(
                "conserved quantity drifted to {} (expected {total}) at {state:?}",
                conserved_quantity(&state, k)
            )));
        }
        if let Some(tr) = trace.as_deref_mut() {
            tr.push(state);
        }
    }
    Ok(Outcome { terminal_time: state.t, terminal_susceptibles: state.s })
}

/// Runs the chain to absorption. Draws exactly `T` uniforms and checks the
/// conserved quantity after every step.
pub fn run_exact<S: UniformSource + ?Sized>(params: &ModelParams, src: &mut S) -> Result<Outcome> {
    run_exact_inner(params, src, None)
}

/// Like [`run_exact`] but also records visited states, initial state included.
pub fn run_exact_traced<S: UniformSource + ?Sized>(
    params: &ModelParams,
    src: &mut S,
    capacity: Option<usize>,
) -> Result<(Outcome, Trajectory<ChainState>)> {
    let mut tr = capacity.map_or_else(Trajectory::unbounded, Trajectory::with_capacity);
    let out = run_exact_inner(params, src, Some(&mut tr))?;
    Ok((out, tr))
}
