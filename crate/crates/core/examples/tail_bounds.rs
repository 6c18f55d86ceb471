//! Binomial upper-tail bounds against the exact tail.

use rumour::analysis::{binomial_tail_bound, entropy_h, exact_binomial_tail, TailBoundQuery};
use rumour::harness::tail_bound_grid;

fn main() -> rumour::Result<()> {
    println!("{:>6} {:>5} {:>5} {:>12} {:>12} {:>12}", "n", "p", "q", "exact", "bound", "chernoff");
    for &(n, p, q) in &[(100, 0.1, 0.2), (1000, 0.1, 0.15), (1000, 0.5, 0.6), (10_000, 0.3, 0.32)] {
        let query = TailBoundQuery::new(n, p, q)?;
        let chernoff = (-(n as f64) * entropy_h(q, p)?).exp();
        println!(
            "{n:>6} {p:>5} {q:>5} {:>12.4e} {:>12.4e} {chernoff:>12.4e}",
            exact_binomial_tail(n, p, q)?,
            binomial_tail_bound(&query)
        );
    }
    let grid = tail_bound_grid()?;
    println!("grid: {} points, {} violations, worst ratio {:.4}", grid.points, grid.exact_violations, grid.worst_ratio);
    Ok(())
}
