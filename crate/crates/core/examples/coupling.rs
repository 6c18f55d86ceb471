//! The chain and the walk driven by the same uniforms end in the same place.

use rumour::chain::run_exact_traced;
use rand::Rng;
use rumour::rng::{rng_from_seed, ReplaySource};
use rumour::walk::run_walk_traced;
use rumour::ModelParams;

fn main() -> rumour::Result<()> {
    let params = ModelParams::new(40, 1)?;
    let mut rng = rng_from_seed(3);
    // one uniform per step is enough for any run of this size
    let uniforms: Vec<f64> = (0..params.max_terminal_time()).map(|_| rng.random()).collect();

    let mut a = ReplaySource::new(uniforms.clone());
    let (chain, path) = run_exact_traced(&params, &mut a, None)?;
    let mut b = ReplaySource::new(uniforms);
    let (walk, wpath) = run_walk_traced(&params, &mut b, None)?;

    println!("{} uniforms consumed by the chain, {} by the walk", a.consumed(), b.consumed());
    println!("chain: T = {} S_T = {}", chain.terminal_time, chain.terminal_susceptibles);
    println!("walk:  T = {} S~_T = {}", walk.terminal_time, walk.terminal_susceptibles);
    for (c, w) in path.iter().zip(wpath.iter()).step_by(5) {
        println!("  t = {:>3}  S = {:>2}  S~ = {:>2}  I = {:>2}", c.t, c.s, w.s_tilde, c.i);
    }
    assert_eq!(chain, walk);
    Ok(())
}
