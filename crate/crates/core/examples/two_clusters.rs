//! Terminal points split into early extinction and the macroscopic outbreak.

use rumour::harness::{f_exceedance_fraction, two_cluster_check};
use rumour::{run_ensemble, Engine, EnsembleConfig, ModelParams};

fn main() -> rumour::Result<()> {
    for n in [1_000u64, 10_000, 100_000] {
        let params = ModelParams::new(n, 1)?;
        let config = EnsembleConfig::new(params, 1000, 21, Engine::Geometric);
        let report = two_cluster_check(&config, 0.05)?;
        let outcomes: Vec<_> = run_ensemble(&config)?.records.into_iter().map(|r| r.outcome).collect();
        println!(
            "n = {n:>6}: extinction {:>4}  takeoff {:>4}  elsewhere {:>3}  |f| > 0.01 in {:.3}",
            report.counts.near_extinction,
            report.counts.near_takeoff,
            report.counts.elsewhere,
            f_exceedance_fraction(&outcomes, &params, 0.01)
        );
    }
    Ok(())
}
