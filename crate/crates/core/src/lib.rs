//! Simulation and verification toolkit for the Maki-Thompson rumour process
//! in which an informed individual stops spreading after `k` failed contacts.
//!
//! Three engines sample the terminal pair `(T, S_T)`:
//!
//! * [`chain::run_exact`] steps the aggregated `(S, I)` chain,
//! * [`walk::run_walk_until_crossing`] runs the coupled lazy walk to its level
//!   crossing and returns the same outcome from the same uniform stream,
//! * [`walk::run_geometric`] sums geometric sojourns in `O(n - S_T)` draws.
//!
//! [`dp::terminal_distribution_dp`] gives the exact terminal law for small
//! populations, [`analysis`] holds the deterministic limit and bounds, and
//! [`harness`] runs seeded ensembles and the statistical checks.

pub mod analysis;
pub mod chain;
pub mod cli;
pub mod dp;
pub mod error;
pub mod harness;
pub mod params;
pub mod rng;
pub mod stats;
pub mod walk;

pub use chain::{conserved_quantity, run_exact, step_exact, ChainState, Outcome, Trajectory};
pub use dp::{terminal_distribution_dp, TerminalDistribution};
pub use error::{Error, Result};
pub use harness::{run_ensemble, Engine, EnsembleConfig, EnsembleStats};
pub use params::ModelParams;
pub use walk::{run_geometric, run_walk_until_crossing, sample_geometric, step_walk, GeomIncrement, WalkState};
