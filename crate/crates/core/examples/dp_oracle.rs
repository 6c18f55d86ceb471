//! Exact terminal law by dynamic programming, compared with simulation.

use rumour::harness::dp_law_tests;
use rumour::{terminal_distribution_dp, ModelParams};

fn main() -> rumour::Result<()> {
    let params = ModelParams::new(8, 2)?;
    let law = terminal_distribution_dp(&params)?;
    println!("P(S_T = s) for n = 8, k = 2 (mass drift {:.1e})", law.mass_drift);
    for (o, p) in law.outcomes() {
        println!("  s = {}  T = {:>2}  {p:.8}", o.terminal_susceptibles, o.terminal_time);
    }
    println!("E[S_T/n] = {:.6}", law.mean_fraction());

    for t in dp_law_tests(&params, 200_000, 11)? {
        println!(
            "{:>9}: chi2 = {:.2} on {} dof, p = {:.3}, {}",
            t.engine.name(),
            t.test.statistic,
            t.test.dof,
            t.test.p_value,
            if t.test.passed { "ok" } else { "rejected" }
        );
    }
    Ok(())
}
