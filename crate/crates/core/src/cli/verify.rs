use std::fs::File;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Value};

use crate::chain::conserved_quantity;
use crate::error::Result;
use crate::harness::{
    coupling_check, dp_law_tests, ost_check, ost_exact, run_ensemble, sweep_is_converging, tail_bound_grid,
    two_cluster_check, variance_check, Engine, EnsembleConfig, CHI_SQUARE_ALPHA, VARIANCE_SLACK, Z_THRESHOLD,
};
use crate::params::ModelParams;

use super::sweep_io::read_sweep_csv;

/// Largest outside-both-balls fraction accepted by the clusters suite.
pub const CLUSTER_OUTSIDE_MAX: f64 = 0.01;
/// Allowed growth of the outside fraction between consecutive sweep rows.
pub const CLUSTER_TREND_SLACK: f64 = 0.01;
/// Tolerance on the exact stopped-martingale identities.
pub const OST_EXACT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Conservation,
    Coupling,
    Dp,
    Ost,
    Variance,
    Clusters,
    Tailbound,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Conservation,
        Suite::Coupling,
        Suite::Dp,
        Suite::Ost,
        Suite::Variance,
        Suite::Clusters,
        Suite::Tailbound,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Conservation => "conservation",
            Suite::Coupling => "coupling",
            Suite::Dp => "dp",
            Suite::Ost => "ost",
            Suite::Variance => "variance",
            Suite::Clusters => "clusters",
            Suite::Tailbound => "tailbound",
            Suite::All => "all",
        }
    }

    /// Default `(n, k, reps)`.
    fn defaults(&self) -> (u64, u64, u64) {
        match self {
            Suite::Conservation => (100, 2, 1_000),
            Suite::Coupling => (100, 1, 10_000),
            Suite::Dp => (8, 2, 100_000),
            Suite::Ost => (1_000, 1, 100_000),
            Suite::Variance => (10_000, 1, 100_000),
            Suite::Clusters => (100_000, 1, 1_000),
            Suite::Tailbound | Suite::All => (0, 0, 0),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub n: Option<u64>,
    pub k: Option<u64>,
    pub reps: Option<u64>,
    pub seed: u64,
    pub delta: f64,
    pub from: Option<PathBuf>,
}

/// One line of the machine-readable verification report.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub suite: &'static str,
    pub passed: bool,
    pub summary: String,
    pub seed: u64,
    pub thresholds: Value,
    pub details: Value,
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<SuiteOutcome> {
    let (dn, dk, dr) = suite.defaults();
    let (n, k, reps) = (opts.n.unwrap_or(dn), opts.k.unwrap_or(dk), opts.reps.unwrap_or(dr));
    let seed = opts.seed;
    let done = |passed: bool, summary: String, thresholds: Value, details: Value| SuiteOutcome {
        suite: suite.name(),
        passed,
        summary,
        seed,
        thresholds,
        details,
    };

    let outcome = match suite {
        Suite::Conservation => {
            let params = ModelParams::new(n, k)?;
            let ens = run_ensemble(&EnsembleConfig::new(params, reps, seed, Engine::Exact).with_trajectories(true))?;
            let total = params.conserved_total();
            let (mut steps, mut broken) = (0u64, 0u64);
            for rec in &ens.records {
                for st in rec.trajectory.iter().flatten() {
                    steps += 1;
                    broken += u64::from(conserved_quantity(st, k) != total);
                }
            }
            done(
                broken == 0,
                format!("n={n} k={k} reps={reps}: {steps} states checked, {broken} violations"),
                json!({ "violations": 0 }),
                json!({ "n": n, "k": k, "replicates": reps, "states": steps, "violations": broken,
                        "outcomes_validated": ens.stats.invariants_checked }),
            )
        }
        Suite::Coupling => {
            let r = coupling_check(&ModelParams::new(n, k)?, reps, seed)?;
            done(
                r.passed,
                format!("n={n} k={k} reps={reps}: {} mismatches", r.mismatches),
                json!({ "mismatches": 0 }),
                serde_json::to_value(&r)?,
            )
        }
        Suite::Dp => {
            let tests = dp_law_tests(&ModelParams::new(n, k)?, reps, seed)?;
            let passed = tests.iter().all(|t| t.test.passed);
            let pv: Vec<String> = tests.iter().map(|t| format!("{}: p={:.4}", t.engine, t.test.p_value)).collect();
            done(
                passed,
                format!("n={n} k={k} reps={reps}: {}", pv.join(", ")),
                json!({ "alpha": CHI_SQUARE_ALPHA }),
                serde_json::to_value(&tests)?,
            )
        }
        Suite::Ost => {
            let mc = ost_check(n, k, reps, seed)?;
            let exact = (3..=10u64)
                .map(|m| ost_exact(&ModelParams::new(m, k)?))
                .collect::<Result<Vec<_>>>()?;
            let exact_ok = exact
                .iter()
                .all(|e| (e.m1 - e.m1_target).abs() <= OST_EXACT_TOL && (e.m2 - e.m2_target).abs() <= OST_EXACT_TOL);
            done(
                mc.passed && exact_ok,
                format!(
                    "n={n} k={k} reps={reps}: z_m1={:.3} z_m2={:.3}; exact identities n=3..10 {}",
                    mc.z_m1,
                    mc.z_m2,
                    if exact_ok { "hold" } else { "FAIL" }
                ),
                json!({ "z": Z_THRESHOLD, "exact_tol": OST_EXACT_TOL }),
                json!({ "monte_carlo": mc, "exact": exact }),
            )
        }
        Suite::Variance => {
            let r = variance_check(n, k, reps, seed)?;
            done(
                r.passed,
                format!("n={n} k={k} reps={reps}: var={:.3e} bound={:.3e} ratio={:.3}", r.empirical_variance, r.bound, r.ratio),
                json!({ "max_ratio": VARIANCE_SLACK }),
                serde_json::to_value(&r)?,
            )
        }
        Suite::Clusters => match &opts.from {
            Some(path) => {
                let rows = read_sweep_csv(File::open(path)?)?;
                let converging = sweep_is_converging(&rows);
                let outside_trend = rows
                    .windows(2)
                    .all(|w| w[1].cluster_outside_fraction <= w[0].cluster_outside_fraction + CLUSTER_TREND_SLACK);
                done(
                    converging && outside_trend,
                    format!(
                        "{} rows from {}: abs_dev trend {}, outside-fraction trend {}",
                        rows.len(),
                        path.display(),
                        if converging { "ok" } else { "FAIL" },
                        if outside_trend { "ok" } else { "FAIL" }
                    ),
                    json!({ "trend_slack": CLUSTER_TREND_SLACK, "abs_dev_noise_multiplier": 2.0 }),
                    serde_json::to_value(&rows)?,
                )
            }
            None => {
                let cfg = EnsembleConfig::new(ModelParams::new(n, k)?, reps, seed, Engine::Geometric);
                let r = two_cluster_check(&cfg, opts.delta)?;
                done(
                    r.outside_fraction < CLUSTER_OUTSIDE_MAX,
                    format!("n={n} k={k} reps={reps} delta={}: outside fraction {:.4}", r.delta, r.outside_fraction),
                    json!({ "max_outside_fraction": CLUSTER_OUTSIDE_MAX }),
                    serde_json::to_value(&r)?,
                )
            }
        },
        Suite::Tailbound => {
            let r = tail_bound_grid()?;
            done(
                r.passed,
                format!(
                    "{} grid points: {} exact and {} entropy-bound violations",
                    r.points, r.exact_violations, r.chernoff_violations
                ),
                json!({ "violations": 0 }),
                serde_json::to_value(&r)?,
            )
        }
        Suite::All => unreachable!("expanded by the caller"),
    };
    Ok(outcome)
}
