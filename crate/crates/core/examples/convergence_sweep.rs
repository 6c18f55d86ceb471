//! Conditioned mean of S_T/n approaching y* as n grows, written as CSV.

use rumour::cli::write_sweep_csv;
use rumour::harness::{convergence_sweep, sweep_is_converging, DEFAULT_DELTA};

fn main() -> rumour::Result<()> {
    let rows = convergence_sweep(2, &[1_000, 10_000, 100_000], 300, 4, DEFAULT_DELTA)?;
    write_sweep_csv(&rows, std::io::stdout().lock())?;
    eprintln!("converging: {}", sweep_is_converging(&rows));
    Ok(())
}
