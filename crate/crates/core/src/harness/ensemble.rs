use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{limit_proportion, LimitPoint, DEFAULT_TOL};
use crate::chain::{run_exact, run_exact_traced, ChainState, Outcome};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::rng::{replicate_rng, replicate_seed, rng_from_seed, UniformSource};
use crate::stats::Summary;
use crate::walk::{run_geometric, run_walk_traced, run_walk_until_crossing};

use super::DEFAULT_DELTA;

/// Simulation engine; all three sample the same law of `(T, S_T)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Step-by-step chain on `(S, I)`.
    Exact,
    /// Coupled lazy walk stopped at its level crossing.
    Walk,
    /// Sum of geometric sojourns.
    Geometric,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::Exact, Engine::Walk, Engine::Geometric];

    pub fn name(&self) -> &'static str {
        match self {
            Engine::Exact => "exact",
            Engine::Walk => "walk",
            Engine::Geometric => "geometric",
        }
    }

    pub fn run<S: UniformSource + ?Sized>(&self, params: &ModelParams, src: &mut S) -> Result<Outcome> {
        match self {
            Engine::Exact => run_exact(params, src),
            Engine::Walk => run_walk_until_crossing(params, src),
            Engine::Geometric => run_geometric(params, src),
        }
    }

    /// Rejects parameter combinations the engine does not support.
    pub fn check(&self, params: &ModelParams) -> Result<()> {
        match self {
            Engine::Exact => Ok(()),
            Engine::Walk | Engine::Geometric => {
                params.require_single_infective(&format!("the {} engine", self.name()))
            }
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Engine::Exact),
            "walk" => Ok(Engine::Walk),
            "geometric" => Ok(Engine::Geometric),
            other => Err(Error::param(format!("unknown engine '{other}' (expected exact, walk or geometric)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleConfig {
    pub params: ModelParams,
    pub replicates: u64,
    pub master_seed: u64,
    pub engine: Engine,
    /// Keep per-step states (exact and walk engines only).
    pub record_trajectories: bool,
    /// Ball radius for the cluster classification.
    pub delta: f64,
}

impl EnsembleConfig {
    pub fn new(params: ModelParams, replicates: u64, master_seed: u64, engine: Engine) -> Self {
        Self { params, replicates, master_seed, engine, record_trajectories: false, delta: DEFAULT_DELTA }
    }

    pub fn with_trajectories(mut self, record: bool) -> Self {
        self.record_trajectories = record;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::param("at least one replicate is required"));
        }
        if !(self.delta > 0.0) {
            return Err(Error::param(format!("cluster radius must be positive, got {}", self.delta)));
        }
        self.engine.check(&self.params)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateRecord {
    pub index: u64,
    /// Seed of this replicate's generator; rerunning with it reproduces the record.
    pub seed: u64,
    pub outcome: Outcome,
    /// `(s, i, t)` per step. For the walk `i` is recovered from the
    /// conservation law. Never recorded for the geometric engine.
    pub trajectory: Option<Vec<ChainState>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Cluster {
    /// Near `(0, 1)`: the rumour died out early.
    Extinction,
    /// Near `(x*, y*)`: the rumour took off.
    Takeoff,
    Elsewhere,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ClusterCounts {
    pub near_extinction: u64,
    pub near_takeoff: u64,
    pub elsewhere: u64,
}

impl ClusterCounts {
    pub fn add(&mut self, c: Cluster) {
        match c {
            Cluster::Extinction => self.near_extinction += 1,
            Cluster::Takeoff => self.near_takeoff += 1,
            Cluster::Elsewhere => self.elsewhere += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.near_extinction + self.near_takeoff + self.elsewhere
    }

    pub fn outside_fraction(&self) -> f64 {
        self.elsewhere as f64 / self.total() as f64
    }
}

/// Places `(T/n, S_T/n)`, clamped into `[0, k+1] x [0, 1]`, in the open ball of
/// radius `delta` around the nearer zero of the cluster map, if any.
pub fn classify(outcome: &Outcome, params: &ModelParams, limit: &LimitPoint, delta: f64) -> Cluster {
    let n = params.n();
    let x = outcome.time_over_n(n).clamp(0.0, (params.k() + 1) as f64);
    let y = outcome.fraction(n).clamp(0.0, 1.0);
    let d_ext = x.hypot(y - 1.0);
    let d_take = (x - limit.x_star).hypot(y - limit.y_star);
    if d_ext.min(d_take) >= delta {
        Cluster::Elsewhere
    } else if d_ext <= d_take {
        Cluster::Extinction
    } else {
        Cluster::Takeoff
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleStats {
    pub replicates: u64,
    /// Mean of `S_T/n` over all replicates.
    pub mean_fraction: f64,
    pub var_fraction: f64,
    pub stderr: f64,
    pub ci95: (f64, f64),
    pub mean_t_over_n: f64,
    pub cluster_counts: ClusterCounts,
    pub delta: f64,
    pub y_star: f64,
    pub x_star: f64,
    /// Mean of `S_T/n` over replicates in the takeoff cluster.
    pub conditioned_mean: Option<f64>,
    pub conditioned_stderr: Option<f64>,
    /// Replicates whose outcome passed every structural check.
    pub invariants_checked: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Ensemble {
    pub config: EnsembleConfig,
    pub stats: EnsembleStats,
    pub records: Vec<ReplicateRecord>,
}

fn walk_states_to_chain(params: &ModelParams, states: impl Iterator<Item = crate::walk::WalkState>) -> Vec<ChainState> {
    let total = params.conserved_total();
    let k1 = params.k() + 1;
    states
        .map(|w| ChainState { s: w.s_tilde, i: total - k1 * w.s_tilde - w.t, t: w.t })
        .collect()
}

fn run_replicate(config: &EnsembleConfig, index: u64) -> Result<ReplicateRecord> {
    let seed = replicate_seed(config.master_seed, index);
    let mut rng = rng_from_seed(seed);
    let params = &config.params;
    let (outcome, trajectory) = match (config.engine, config.record_trajectories) {
        (Engine::Exact, true) => {
            let (o, tr) = run_exact_traced(params, &mut rng, None)?;
            (o, Some(tr.to_vec()))
        }
        (Engine::Walk, true) => {
            let (o, tr) = run_walk_traced(params, &mut rng, None)?;
            (o, Some(walk_states_to_chain(params, tr.iter().copied())))
        }
        (engine, _) => (engine.run(params, &mut rng)?, None),
    };
    outcome.validate(params)?;
    Ok(ReplicateRecord { index, seed, outcome, trajectory })
}

/// Runs `config.replicates` independent replicates. Replicate `r` draws from
/// the generator seeded by [`replicate_seed`]`(master_seed, r)`; records and
/// statistics are assembled in replicate order, so the result does not depend
/// on the thread count.
pub fn run_ensemble(config: &EnsembleConfig) -> Result<Ensemble> {
    config.validate()?;
    let limit = limit_proportion(config.params.k(), DEFAULT_TOL)?;
    let records: Vec<ReplicateRecord> = (0..config.replicates)
        .into_par_iter()
        .map(|r| run_replicate(config, r))
        .collect::<Result<_>>()?;

    let n = config.params.n();
    let mut all = Summary::default();
    let mut takeoff = Summary::default();
    let mut times = Summary::default();
    let mut counts = ClusterCounts::default();
    for rec in &records {
        let frac = rec.outcome.fraction(n);
        all.push(frac);
        times.push(rec.outcome.time_over_n(n));
        let cluster = classify(&rec.outcome, &config.params, &limit, config.delta);
        counts.add(cluster);
        if cluster == Cluster::Takeoff {
            takeoff.push(frac);
        }
    }
    let (conditioned_mean, conditioned_stderr) = if takeoff.count() > 0 {
        (Some(takeoff.mean()), Some(takeoff.stderr()))
    } else {
        (None, None)
    };
    let stats = EnsembleStats {
        replicates: config.replicates,
        mean_fraction: all.mean(),
        var_fraction: all.variance(),
        stderr: all.stderr(),
        ci95: all.ci95(),
        mean_t_over_n: times.mean(),
        cluster_counts: counts,
        delta: config.delta,
        y_star: limit.y_star,
        x_star: limit.x_star,
        conditioned_mean,
        conditioned_stderr,
        invariants_checked: records.len() as u64,
    };
    Ok(Ensemble { config: *config, stats, records })
}

/// Counts of `S_T` over `0..n` without keeping per-replicate records.
/// Every outcome is validated.
pub fn terminal_histogram(params: &ModelParams, engine: Engine, replicates: u64, master_seed: u64) -> Result<Vec<u64>> {
    engine.check(params)?;
    let size = params.n() as usize;
    (0..replicates)
        .into_par_iter()
        .try_fold(
            || vec![0u64; size],
            |mut acc, r| {
                let out = engine.run(params, &mut replicate_rng(master_seed, r))?;
                out.validate(params)?;
                acc[out.terminal_susceptibles as usize] += 1;
                Ok(acc)
            },
        )
        .try_reduce(
            || vec![0u64; size],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )
}
