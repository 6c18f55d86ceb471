//! Stopped-martingale identities, exactly and by Monte Carlo.

use rumour::analysis::{martingale_transform, variance_bound};
use rumour::harness::{ost_check, ost_exact, variance_check};
use rumour::rng::rng_from_seed;
use rumour::walk::run_walk_traced;
use rumour::ModelParams;

fn main() -> rumour::Result<()> {
    let params = ModelParams::new(200, 1)?;
    let exact = ost_exact(&params)?;
    println!("exact  E[M1_T] = {:.10} (target {})", exact.m1, exact.m1_target);
    println!("exact  E[M2_T] = {:.6} (target {})", exact.m2, exact.m2_target);

    let mc = ost_check(1000, 1, 50_000, 5)?;
    println!("MC     z(M1) = {:+.2}  z(M2) = {:+.2}", mc.z_m1, mc.z_m2);

    let (_, path) = run_walk_traced(&params, &mut rng_from_seed(5), None)?;
    let series = martingale_transform(&path.to_vec(), params.n())?;
    for t in (0..=series.stopped_at).step_by(50) {
        let (m1, m2) = series.at(t);
        println!("  t = {t:>3}  M1 = {m1:>9.3}  M2 = {m2:>11.1}");
    }

    let v = variance_check(10_000, 1, 20_000, 5)?;
    println!(
        "Var(S_T/n) = {:.3e}, bound {:.3e} (closed form {:.3e}), ratio {:.3}",
        v.empirical_variance,
        v.bound,
        variance_bound(1, 10_000)?,
        v.ratio
    );
    Ok(())
}
