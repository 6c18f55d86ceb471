use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{
    binomial_tail_bound, entropy_h, exact_binomial_tail, f_map, limit_proportion, m1_value, m2_value, variance_bound,
    TailBoundQuery, DEFAULT_TOL,
};
use crate::chain::{run_exact, Outcome};
use crate::dp::{terminal_distribution_dp, TerminalDistribution};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::rng::replicate_rng;
use crate::stats::{chi_square_gof, chi_square_two_sample, ChiSquareTest, Summary};
use crate::walk::run_walk_until_crossing;

use super::ensemble::{run_ensemble, terminal_histogram, ClusterCounts, Engine, EnsembleConfig};
use super::{CHI_SQUARE_ALPHA, VARIANCE_SLACK, Z_THRESHOLD};

/// Largest population for which engine laws are compared with the exact DP.
pub const DP_EQUIVALENCE_MAX_N: u64 = 64;
/// Smallest population for the variance check.
pub const MIN_VARIANCE_N: u64 = 10_000;
/// Radius used for the concentration fraction of the variance check.
const CONCENTRATION_RADIUS: f64 = 0.05;

#[derive(Debug, Clone, Serialize)]
pub struct ClusterReport {
    pub n: u64,
    pub k: u64,
    pub delta: f64,
    pub counts: ClusterCounts,
    pub outside_fraction: f64,
}

/// Fraction of replicates whose `(T/n, S_T/n)` is in neither `delta`-ball.
pub fn two_cluster_check(config: &EnsembleConfig, delta: f64) -> Result<ClusterReport> {
    let ens = run_ensemble(&config.with_delta(delta))?;
    let counts = ens.stats.cluster_counts;
    Ok(ClusterReport {
        n: config.params.n(),
        k: config.params.k(),
        delta,
        counts,
        outside_fraction: counts.outside_fraction(),
    })
}

/// Fraction of outcomes with `|f(T/n, S_T/n)| > eps` after clamping into the box.
pub fn f_exceedance_fraction(outcomes: &[Outcome], params: &ModelParams, eps: f64) -> f64 {
    let (n, k) = (params.n(), params.k());
    let over = outcomes
        .iter()
        .filter(|o| {
            let x = o.time_over_n(n).clamp(0.0, (k + 1) as f64);
            let y = o.fraction(n).clamp(0.0, 1.0);
            let (a, b) = f_map(x, y, k);
            a.hypot(b) > eps
        })
        .count();
    over as f64 / outcomes.len() as f64
}

/// Stopped-martingale expectations computed from the exact terminal law.
#[derive(Debug, Clone, Serialize)]
pub struct OstExact {
    pub n: u64,
    pub k: u64,
    /// `E[(n/(n-1))^T S_T]`.
    pub m1: f64,
    /// `n - 1`.
    pub m1_target: f64,
    /// `E[(n/(n-2))^T S_T (S_T - 1)]`.
    pub m2: f64,
    /// `(n-1)(n-2)`.
    pub m2_target: f64,
}

pub fn ost_exact(params: &ModelParams) -> Result<OstExact> {
    params.require_single_infective("the stopped-martingale identities")?;
    let n = params.n();
    if n < 3 {
        return Err(Error::param(format!("martingale identities need n >= 3, got {n}")));
    }
    let law: TerminalDistribution = terminal_distribution_dp(params)?;
    Ok(OstExact {
        n,
        k: params.k(),
        m1: law.expectation(|o| m1_value(n, o.terminal_time, o.terminal_susceptibles)),
        m1_target: (n - 1) as f64,
        m2: law.expectation(|o| m2_value(n, o.terminal_time, o.terminal_susceptibles)),
        m2_target: ((n - 1) * (n - 2)) as f64,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct OstReport {
    pub n: u64,
    pub k: u64,
    pub replicates: u64,
    pub m1_mean: f64,
    pub m1_stderr: f64,
    pub m1_target: f64,
    pub z_m1: f64,
    pub m2_mean: f64,
    pub m2_stderr: f64,
    pub m2_target: f64,
    pub z_m2: f64,
    pub z_threshold: f64,
    pub passed: bool,
}

/// Monte Carlo check of both optional-stopping identities.
pub fn ost_check(n: u64, k: u64, replicates: u64, seed: u64) -> Result<OstReport> {
    if n < 3 {
        return Err(Error::param(format!("martingale identities need n >= 3, got {n}")));
    }
    let params = ModelParams::new(n, k)?;
    let ens = run_ensemble(&EnsembleConfig::new(params, replicates, seed, Engine::Geometric))?;
    let m1: Summary = ens
        .records
        .iter()
        .map(|r| m1_value(n, r.outcome.terminal_time, r.outcome.terminal_susceptibles))
        .collect();
    let m2: Summary = ens
        .records
        .iter()
        .map(|r| m2_value(n, r.outcome.terminal_time, r.outcome.terminal_susceptibles))
        .collect();
    let m1_target = (n - 1) as f64;
    let m2_target = ((n - 1) * (n - 2)) as f64;
    let z_m1 = (m1.mean() - m1_target) / m1.stderr();
    let z_m2 = (m2.mean() - m2_target) / m2.stderr();
    Ok(OstReport {
        n,
        k,
        replicates,
        m1_mean: m1.mean(),
        m1_stderr: m1.stderr(),
        m1_target,
        z_m1,
        m2_mean: m2.mean(),
        m2_stderr: m2.stderr(),
        m2_target,
        z_m2,
        z_threshold: Z_THRESHOLD,
        passed: z_m1.abs() <= Z_THRESHOLD && z_m2.abs() <= Z_THRESHOLD,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct VarianceReport {
    pub n: u64,
    pub k: u64,
    pub replicates: u64,
    /// Sample variance of `(n/(n-1))^T S_T / n`.
    pub empirical_variance: f64,
    pub bound: f64,
    pub ratio: f64,
    pub max_ratio: f64,
    /// Fraction of replicates with `|(n/(n-1))^T S_T / n - 1| > 0.05`.
    pub outside_concentration: f64,
    pub passed: bool,
}

pub fn variance_check(n: u64, k: u64, replicates: u64, seed: u64) -> Result<VarianceReport> {
    if n < MIN_VARIANCE_N {
        return Err(Error::param(format!("variance check needs n >= {MIN_VARIANCE_N}, got {n}")));
    }
    let params = ModelParams::new(n, k)?;
    let ens = run_ensemble(&EnsembleConfig::new(params, replicates, seed, Engine::Geometric))?;
    let values: Vec<f64> = ens
        .records
        .iter()
        .map(|r| m1_value(n, r.outcome.terminal_time, r.outcome.terminal_susceptibles) / n as f64)
        .collect();
    let summary: Summary = values.iter().copied().collect();
    let outside = values.iter().filter(|v| (*v - 1.0).abs() > CONCENTRATION_RADIUS).count();
    let bound = variance_bound(k, n)?;
    let ratio = summary.variance() / bound;
    Ok(VarianceReport {
        n,
        k,
        replicates,
        empirical_variance: summary.variance(),
        bound,
        ratio,
        max_ratio: VARIANCE_SLACK,
        outside_concentration: outside as f64 / values.len() as f64,
        passed: ratio <= VARIANCE_SLACK,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EngineLawTest {
    pub engine: Engine,
    pub test: ChiSquareTest,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub n: u64,
    pub k: u64,
    pub replicates: u64,
    pub coupling_checked: u64,
    pub coupling_mismatches: u64,
    /// Each engine against the exact law, when `n` is small enough.
    pub dp_tests: Vec<EngineLawTest>,
    /// Geometric against exact, for larger `n`.
    pub two_sample: Option<ChiSquareTest>,
    pub invariants_checked: u64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CouplingReport {
    pub n: u64,
    pub k: u64,
    pub replicates: u64,
    pub mismatches: u64,
    pub passed: bool,
}

/// Runs the chain and the walk on the same stream for every replicate and
/// counts disagreements in `(T, S_T)`.
pub fn coupling_check(params: &ModelParams, replicates: u64, seed: u64) -> Result<CouplingReport> {
    params.require_single_infective("the coupling")?;
    let mismatches = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let a = run_exact(params, &mut replicate_rng(seed, r))?;
            let b = run_walk_until_crossing(params, &mut replicate_rng(seed, r))?;
            a.validate(params)?;
            b.validate(params)?;
            Ok::<_, Error>(u64::from(a != b))
        })
        .try_reduce(|| 0, |x, y| Ok(x + y))?;
    Ok(CouplingReport { n: params.n(), k: params.k(), replicates, mismatches, passed: mismatches == 0 })
}

/// Chi-square test of every engine's terminal law against the exact one.
pub fn dp_law_tests(params: &ModelParams, replicates: u64, seed: u64) -> Result<Vec<EngineLawTest>> {
    let law = terminal_distribution_dp(params)?;
    let probs: Vec<f64> = (0..params.n()).map(|s| law.probability(s)).collect();
    Engine::ALL
        .iter()
        .map(|&engine| {
            let hist = terminal_histogram(params, engine, replicates, seed)?;
            Ok(EngineLawTest { engine, test: chi_square_gof(&hist, &probs, CHI_SQUARE_ALPHA) })
        })
        .collect()
}

/// Coupling on the shared stream, then each engine against the exact law
/// (`n <= DP_EQUIVALENCE_MAX_N`) or geometric against exact by a two-sample
/// test (larger `n`).
pub fn engine_equivalence(n: u64, k: u64, replicates: u64, seed: u64) -> Result<EquivalenceReport> {
    let params = ModelParams::new(n, k)?;
    let coupling = coupling_check(&params, replicates, seed)?;
    let mut checked = 2 * replicates;

    let mut dp_tests = Vec::new();
    let mut two_sample = None;
    if n <= DP_EQUIVALENCE_MAX_N {
        dp_tests = dp_law_tests(&params, replicates, seed)?;
        checked += 3 * replicates;
    } else {
        let exact = terminal_histogram(&params, Engine::Exact, replicates, seed)?;
        // a different master seed keeps the two samples independent
        let geo = terminal_histogram(&params, Engine::Geometric, replicates, seed ^ 0x5_eed0_f9e0)?;
        checked += 2 * replicates;
        two_sample = Some(chi_square_two_sample(&exact, &geo, CHI_SQUARE_ALPHA));
    }
    let passed = coupling.passed
        && dp_tests.iter().all(|t| t.test.passed)
        && two_sample.is_none_or(|t| t.passed);
    Ok(EquivalenceReport {
        n,
        k,
        replicates,
        coupling_checked: replicates,
        coupling_mismatches: coupling.mismatches,
        dp_tests,
        two_sample,
        invariants_checked: checked,
        passed,
    })
}

/// One row of a convergence sweep; columns match the sweep CSV.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct SweepRow {
    pub n: u64,
    pub raw_mean: f64,
    /// Takeoff-conditioned mean of `S_T/n`; NaN when no replicate took off.
    pub conditioned_mean: f64,
    /// Standard error of the conditioned mean.
    pub stderr: f64,
    pub y_star: f64,
    /// `|conditioned_mean - y*|`.
    pub abs_dev: f64,
    pub cluster_outside_fraction: f64,
}

/// Runs the geometric engine at each population size; row `i` uses master
/// seed `seed + i`.
pub fn convergence_sweep(k: u64, n_list: &[u64], replicates: u64, seed: u64, delta: f64) -> Result<Vec<SweepRow>> {
    if n_list.is_empty() {
        return Err(Error::param("the population list is empty"));
    }
    let y_star = limit_proportion(k, DEFAULT_TOL)?.y_star;
    n_list
        .iter()
        .enumerate()
        .map(|(idx, &n)| {
            let params = ModelParams::new(n, k)?;
            let cfg = EnsembleConfig::new(params, replicates, seed.wrapping_add(idx as u64), Engine::Geometric)
                .with_delta(delta);
            let st = run_ensemble(&cfg)?.stats;
            let cond = st.conditioned_mean.unwrap_or(f64::NAN);
            Ok(SweepRow {
                n,
                raw_mean: st.mean_fraction,
                conditioned_mean: cond,
                stderr: st.conditioned_stderr.unwrap_or(f64::NAN),
                y_star,
                abs_dev: (cond - y_star).abs(),
                cluster_outside_fraction: st.cluster_counts.outside_fraction(),
            })
        })
        .collect()
}

/// True when `abs_dev` never grows by more than twice the larger standard
/// error of two consecutive rows.
pub fn sweep_is_converging(rows: &[SweepRow]) -> bool {
    rows.windows(2).all(|w| {
        let noise = 2.0 * w[0].stderr.max(w[1].stderr);
        w[1].abs_dev <= w[0].abs_dev + noise
    })
}

/// Populations of the tail-bound grid.
pub const TAIL_GRID_TRIALS: [u64; 5] = [1, 5, 10, 50, 200];

#[derive(Debug, Clone, Serialize)]
pub struct TailGridReport {
    pub points: u64,
    /// Points where the exact tail exceeds the bound.
    pub exact_violations: u64,
    /// Points where `exp(-n H(q;p))` exceeds the bound.
    pub chernoff_violations: u64,
    /// Largest `exact / bound` seen.
    pub worst_ratio: f64,
    pub passed: bool,
}

/// Compares the exact binomial tail and the relative-entropy bound with the
/// simplified bound for `n` in [`TAIL_GRID_TRIALS`] and `p < q` on the grid
/// `0.05, 0.10, ..., 0.95`.
pub fn tail_bound_grid() -> Result<TailGridReport> {
    let grid: Vec<f64> = (1..20).map(|m| m as f64 / 20.0).collect();
    let mut report =
        TailGridReport { points: 0, exact_violations: 0, chernoff_violations: 0, worst_ratio: 0.0, passed: false };
    for n in TAIL_GRID_TRIALS {
        for &p in &grid {
            for &q in grid.iter().filter(|&&q| q > p) {
                let bound = binomial_tail_bound(&TailBoundQuery::new(n, p, q)?);
                let exact = exact_binomial_tail(n, p, q)?;
                let chernoff = (-(n as f64) * entropy_h(q, p)?).exp();
                report.points += 1;
                report.exact_violations += u64::from(exact > bound);
                report.chernoff_violations += u64::from(chernoff > bound);
                report.worst_ratio = report.worst_ratio.max(exact / bound);
            }
        }
    }
    report.passed = report.exact_violations == 0 && report.chernoff_violations == 0;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_grid_has_no_violations() {
        let r = tail_bound_grid().unwrap();
        assert_eq!(r.points, 5 * 171);
        assert!(r.passed, "{r:?}");
        assert!(r.worst_ratio <= 1.0);
    }

    #[test]
    fn exact_ost_identities_small_n() {
        for n in 3..=10 {
            for k in 1..=3 {
                let r = ost_exact(&ModelParams::new(n, k).unwrap()).unwrap();
                assert!((r.m1 - r.m1_target).abs() < 1e-10, "{r:?}");
                assert!((r.m2 - r.m2_target).abs() < 1e-10, "{r:?}");
            }
        }
        let r = ost_exact(&ModelParams::new(3, 1).unwrap()).unwrap();
        assert!((r.m1 - 2.0).abs() < 1e-10);
        assert!(ost_exact(&ModelParams::new(2, 1).unwrap()).is_err());
    }

    #[test]
    fn ost_rejects_tiny_populations() {
        assert!(ost_check(1, 1, 10, 0).is_err());
        assert!(ost_check(2, 1, 10, 0).is_err());
    }

    #[test]
    fn variance_needs_asymptotic_regime() {
        assert!(variance_check(1000, 1, 10, 0).is_err());
    }

    #[test]
    fn ost_monte_carlo_moderate() {
        let r = ost_check(200, 2, 20_000, 3).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn single_individual_equivalence() {
        let r = engine_equivalence(1, 3, 1000, 1).unwrap();
        assert!(r.passed);
        assert_eq!(r.coupling_mismatches, 0);
    }

    #[test]
    fn equivalence_small_and_large() {
        let small = engine_equivalence(7, 2, 50_000, 11).unwrap();
        assert!(small.passed, "{small:?}");
        assert_eq!(small.dp_tests.len(), 3);
        let large = engine_equivalence(400, 1, 20_000, 12).unwrap();
        assert!(large.passed, "{large:?}");
        assert!(large.two_sample.is_some());
    }

    #[test]
    fn huge_radius_leaves_nothing_outside() {
        let params = ModelParams::new(500, 2).unwrap();
        let r = two_cluster_check(&EnsembleConfig::new(params, 100, 4, Engine::Geometric), 4.0).unwrap();
        assert_eq!(r.outside_fraction, 0.0);
        assert_eq!(r.counts.total(), 100);
    }

    #[test]
    fn sweep_rows_and_trend() {
        let rows = convergence_sweep(1, &[500, 5000], 200, 8, 0.05).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| (r.y_star - 0.2031878699799).abs() < 1e-12));
        assert!(convergence_sweep(1, &[], 10, 0, 0.05).is_err());
        let row = |abs_dev, stderr| SweepRow {
            n: 1,
            raw_mean: 0.0,
            conditioned_mean: 0.0,
            stderr,
            y_star: 0.0,
            abs_dev,
            cluster_outside_fraction: 0.0,
        };
        assert!(sweep_is_converging(&[row(0.02, 0.001), row(0.005, 0.001)]));
        assert!(!sweep_is_converging(&[row(0.005, 0.001), row(0.02, 0.001)]));
    }
}
