//! One replicate per engine from the same seed, then a small ensemble.
//!
//! `cargo run --example simulate -- 100000 1`

use rumour::rng::rng_from_seed;
use rumour::{run_ensemble, Engine, EnsembleConfig, ModelParams};

fn main() -> rumour::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: u64 = args.next().map_or(100_000, |a| a.parse().expect("n"));
    let k: u64 = args.next().map_or(1, |a| a.parse().expect("k"));
    let params = ModelParams::new(n, k)?;

    for engine in Engine::ALL {
        let mut rng = rng_from_seed(7);
        let out = engine.run(&params, &mut rng)?;
        println!("{:>9}: T = {:>8}  S_T = {:>7}  S_T/n = {:.5}", engine.name(), out.terminal_time, out.terminal_susceptibles, out.fraction(n));
    }

    let ens = run_ensemble(&EnsembleConfig::new(params, 500, 7, Engine::Geometric))?;
    let s = &ens.stats;
    println!("\n{} replicates, geometric engine", s.replicates);
    println!("raw mean S_T/n      {:.5} +/- {:.5}", s.mean_fraction, s.stderr);
    if let Some(c) = s.conditioned_mean {
        println!("conditioned mean    {c:.5}");
    }
    println!("limit y*            {:.5}", s.y_star);
    println!("clusters            {:?}", s.cluster_counts);
    Ok(())
}
