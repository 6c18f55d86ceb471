//! Monte Carlo ensembles and the statistical checks built on them.

mod checks;
mod ensemble;

pub use checks::{
    convergence_sweep, coupling_check, dp_law_tests, engine_equivalence, f_exceedance_fraction, ost_check, ost_exact, sweep_is_converging,
    tail_bound_grid,    two_cluster_check, variance_check, ClusterReport, CouplingReport, EngineLawTest, EquivalenceReport, OstExact, OstReport,
    SweepRow, TailGridReport, VarianceReport, DP_EQUIVALENCE_MAX_N, MIN_VARIANCE_N, TAIL_GRID_TRIALS,
};
pub use ensemble::{
    classify, run_ensemble, terminal_histogram, Cluster, ClusterCounts, Engine, Ensemble, EnsembleConfig,
    EnsembleStats, ReplicateRecord,
};

/// Default radius of the balls around the two zeros of the cluster map.
pub const DEFAULT_DELTA: f64 = 0.05;
/// Monte Carlo means must sit within this many standard errors of their target.
pub const Z_THRESHOLD: f64 = 4.0;
/// Significance level of every chi-square test.
pub const CHI_SQUARE_ALPHA: f64 = 1e-3;
/// Allowed ratio of empirical variance to its asymptotic bound.
pub const VARIANCE_SLACK: f64 = 2.0;
