//! Limiting susceptible proportion y*(k) against its large-k asymptote.

use rumour::analysis::{limit_proportion, DEFAULT_TOL};

fn main() -> rumour::Result<()> {
    println!("{:>3} {:>16} {:>16} {:>14} {:>10}", "k", "y*", "x*", "e^-(k+1)", "ratio");
    for k in 1..=20 {
        let p = limit_proportion(k, DEFAULT_TOL)?;
        println!("{k:>3} {:>16.12} {:>16.12} {:>14.6e} {:>10.6}", p.y_star, p.x_star, p.asymptotic(), p.y_star / p.asymptotic());
    }
    Ok(())
}
