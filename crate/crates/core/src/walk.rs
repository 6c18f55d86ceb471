//! The lazy non-increasing walk `S~_t` and its two stopping formulations.
//!
//! The walk starts at `n - 1` and steps down with probability `s/n`. Driven by
//! the same uniforms as the exact chain it makes the same decisions, and the
//! chain's absorption time is the first `t` with `(k+1)(n - S~_t) <= t + 1`.
//!
//! Sojourns at successive levels are independent geometrics: the walk spends
//! `X_j ~ Geom((n-j)/n)` steps (support `{1, 2, ...}`) at level `n - j`. The
//! process stops at level `j` exactly when `X_1 + ... + X_j >= (k+1) j`, which
//! gives an `O(n - S_T)` sampler ([`run_geometric`]).

use serde::{Deserialize, Serialize};

use crate::chain::{contact_hits_susceptible, Outcome, Trajectory};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::rng::UniformSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WalkState {
    pub s_tilde: u64,
    pub t: u64,
}

impl WalkState {
    pub fn initial(n: u64) -> Self {
        Self { s_tilde: n - 1, t: 0 }
    }
}

/// One sojourn of the walk: `x_j` steps spent at level `n - j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeomIncrement {
    pub j: u64,
    pub x_j: u64,
}

impl GeomIncrement {
    /// Success probability `(n - j)/n` of the sojourn at level `j`.
    pub fn success_probability(j: u64, n: u64) -> f64 {
        (n - j) as f64 / n as f64
    }
}

/// Level `0` is absorbing since its step-down probability is zero.
#[inline]
pub fn step_walk(state: WalkState, n: u64, u: f64) -> WalkState {
    if contact_hits_susceptible(u, state.s_tilde, n) {
        WalkState { s_tilde: state.s_tilde - 1, t: state.t + 1 }
    } else {
        WalkState { s_tilde: state.s_tilde, t: state.t + 1 }
    }
}

/// `(k+1)(n - s~) <= t + 1`.
#[inline]
pub fn has_crossed(state: &WalkState, n: u64, k: u64) -> bool {
    (k + 1) * (n - state.s_tilde) <= state.t + 1
}

fn run_walk_inner<S: UniformSource + ?Sized>(
    params: &ModelParams,
    src: &mut S,
    mut trace: Option<&mut Trajectory<WalkState>>,
) -> Result<Outcome> {
    params.require_single_infective("the coupled walk")?;
    let (n, k) = (params.n(), params.k());
    let mut state = WalkState::initial(n);
    if let Some(tr) = trace.as_deref_mut() {
        tr.push(state);
    }
    while !has_crossed(&state, n, k) {
        state = step_walk(state, n, src.next_uniform());
        if let Some(tr) = trace.as_deref_mut() {
            tr.push(state);
        }
    }
    Ok(Outcome { terminal_time: state.t, terminal_susceptibles: state.s_tilde })
}

/// Runs the walk until the level-crossing time and returns `(T, S~_T)`.
pub fn run_walk_until_crossing<S: UniformSource + ?Sized>(params: &ModelParams, src: &mut S) -> Result<Outcome> {
    run_walk_inner(params, src, None)
}

pub fn run_walk_traced<S: UniformSource + ?Sized>(
    params: &ModelParams,
    src: &mut S,
    capacity: Option<usize>,
) -> Result<(Outcome, Trajectory<WalkState>)> {
    let mut tr = capacity.map_or_else(Trajectory::unbounded, Trajectory::with_capacity);
    let out = run_walk_inner(params, src, Some(&mut tr))?;
    Ok((out, tr))
}

#[inline]
fn geometric_by_inversion(p: f64, u: f64) -> u64 {
    if p >= 1.0 {
        return 1;
    }
    let x = (u.ln() / (-p).ln_1p()).ceil();
    if x >= u64::MAX as f64 {
        u64::MAX
    } else {
        (x as u64).max(1)
    }
}

/// Number of trials up to and including the first success, by inversion:
/// `ceil(ln u / ln(1 - p))`, at least 1.
pub fn sample_geometric(p: f64, u: f64) -> Result<u64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::param(format!("geometric success probability must lie in (0, 1], got {p}")));
    }
    if !(u > 0.0 && u <= 1.0) {
        return Err(Error::param(format!("inversion uniform must lie in (0, 1], got {u}")));
    }
    Ok(geometric_by_inversion(p, u))
}

fn run_geometric_inner<S: UniformSource + ?Sized>(
    params: &ModelParams,
    src: &mut S,
    mut trace: Option<&mut Vec<GeomIncrement>>,
) -> Result<Outcome> {
    params.require_single_infective("the geometric sampler")?;
    let (n, k) = (params.n(), params.k());
    let nf = n as f64;
    let mut elapsed: u64 = 0;
    let mut j: u64 = 1;
    // at j = n the walk sits at 0 forever, so the condition holds immediately
    while j < n {
        let p = (n - j) as f64 / nf;
        let x = geometric_by_inversion(p, 1.0 - src.next_uniform());
        if let Some(tr) = trace.as_deref_mut() {
            tr.push(GeomIncrement { j, x_j: x });
        }
        elapsed = elapsed.saturating_add(x);
        if elapsed >= (k + 1) * j {
            break;
        }
        j += 1;
    }
    Ok(Outcome::from_terminal_susceptibles(params, n - j))
}

/// Samples `(T, S_T)` from independent geometric sojourns. Draws one uniform
/// per informed level, at most `n - 1`.
pub fn run_geometric<S: UniformSource + ?Sized>(params: &ModelParams, src: &mut S) -> Result<Outcome> {
    run_geometric_inner(params, src, None)
}

/// Like [`run_geometric`], also returning the sojourns drawn. The unbounded
/// sojourn at level `j = n` is never drawn and so never recorded.
pub fn run_geometric_traced<S: UniformSource + ?Sized>(
    params: &ModelParams,
    src: &mut S,
) -> Result<(Outcome, Vec<GeomIncrement>)> {
    let mut incs = Vec::new();
    let out = run_geometric_inner(params, src, Some(&mut incs))?;
    Ok((out, incs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::run_exact;
    use crate::rng::{replicate_rng, CountingSource, ReplaySource};

    #[test]
    fn zero_is_absorbing() {
        for u in [0.0, 0.5, 0.99] {
            assert_eq!(step_walk(WalkState { s_tilde: 0, t: 5 }, 7, u), WalkState { s_tilde: 0, t: 6 });
        }
    }

    #[test]
    fn step_down_branch() {
        assert_eq!(step_walk(WalkState { s_tilde: 2, t: 0 }, 3, 0.5), WalkState { s_tilde: 1, t: 1 });
        assert_eq!(step_walk(WalkState { s_tilde: 2, t: 0 }, 3, 0.8), WalkState { s_tilde: 2, t: 1 });
    }

    #[test]
    fn single_individual_crosses_at_k() {
        let p = ModelParams::new(1, 2).unwrap();
        let out = run_walk_until_crossing(&p, &mut replicate_rng(0, 0)).unwrap();
        assert_eq!(out, Outcome { terminal_time: 2, terminal_susceptibles: 0 });
        let out = run_geometric(&p, &mut ReplaySource::new(vec![])).unwrap();
        assert_eq!(out, Outcome { terminal_time: 2, terminal_susceptibles: 0 });
    }

    #[test]
    fn walk_needs_single_infective() {
        let p = ModelParams::with_initial_infectives(10, 1, 2).unwrap();
        assert!(run_walk_until_crossing(&p, &mut replicate_rng(0, 0)).is_err());
        assert!(run_geometric(&p, &mut replicate_rng(0, 0)).is_err());
    }

    #[test]
    fn geometric_sampler_edges() {
        assert_eq!(sample_geometric(1.0, 0.3).unwrap(), 1);
        assert_eq!(sample_geometric(0.5, 1.0).unwrap(), 1);
        // P(X >= 2) = 1 - p: X >= 2 iff u <= 1 - p
        assert_eq!(sample_geometric(2.0 / 3.0, 0.34).unwrap(), 1);
        assert!(sample_geometric(2.0 / 3.0, 0.33).unwrap() >= 2);
        assert!(sample_geometric(0.0, 0.5).is_err());
        assert!(sample_geometric(1.5, 0.5).is_err());
        assert!(sample_geometric(0.5, 0.0).is_err());
        assert_eq!(sample_geometric(1e-300, 1e-300).unwrap(), u64::MAX);
    }

    #[test]
    fn geometric_mean_at_quarter() {
        let mut rng = replicate_rng(17, 0);
        let draws = 1_000_000;
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..draws {
            let x = sample_geometric(0.25, 1.0 - rng.next_uniform()).unwrap() as f64;
            sum += x;
            sum_sq += x * x;
        }
        let mean = sum / draws as f64;
        let var = sum_sq / draws as f64 - mean * mean;
        let se = (var / draws as f64).sqrt();
        assert!((mean - 4.0).abs() < 3.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn walk_and_chain_agree_on_shared_stream() {
        for k in [1, 2, 5] {
            let p = ModelParams::new(60, k).unwrap();
            for r in 0..200 {
                let a = run_exact(&p, &mut replicate_rng(r, 1)).unwrap();
                let mut src = CountingSource::new(replicate_rng(r, 1));
                let b = run_walk_until_crossing(&p, &mut src).unwrap();
                assert_eq!(a, b);
                assert_eq!(src.drawn(), b.terminal_time);
            }
        }
    }

    #[test]
    fn crossing_is_the_first_one() {
        let p = ModelParams::new(80, 2).unwrap();
        for r in 0..100 {
            let (out, tr) = run_walk_traced(&p, &mut replicate_rng(r, 2), None).unwrap();
            let states = tr.to_vec();
            assert_eq!(states.len() as u64, out.terminal_time + 1);
            let (last, before) = states.split_last().unwrap();
            assert!(has_crossed(last, 80, 2));
            assert!(before.iter().all(|st| !has_crossed(st, 80, 2)));
            assert!(states.windows(2).all(|w| w[0].s_tilde - w[1].s_tilde <= 1));
        }
    }

    #[test]
    fn geometric_trace_is_consistent() {
        let (n, k) = (200, 1);
        let p = ModelParams::new(n, k).unwrap();
        for r in 0..200 {
            let (out, incs) = run_geometric_traced(&p, &mut replicate_rng(r, 3)).unwrap();
            out.validate(&p).unwrap();
            let j_star = n - out.terminal_susceptibles;
            let mut sum = 0u64;
            for inc in &incs {
                assert!(inc.x_j >= 1);
                sum += inc.x_j;
                if inc.j < j_star {
                    assert!(sum < (k + 1) * inc.j);
                }
            }
            if j_star < n {
                assert_eq!(incs.last().unwrap().j, j_star);
                assert!(sum >= (k + 1) * j_star);
            }
            let probs: Vec<f64> = incs.iter().map(|i| GeomIncrement::success_probability(i.j, n)).collect();
            assert!(probs.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn geometric_uses_one_uniform_per_level() {
        let p = ModelParams::new(1000, 1).unwrap();
        let mut src = CountingSource::new(replicate_rng(5, 5));
        let out = run_geometric(&p, &mut src).unwrap();
        assert!(src.drawn() <= 1000 - out.terminal_susceptibles);
    }
}
