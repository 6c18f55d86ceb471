//! Deterministic side of the model: the limiting proportion of uninformed
//! individuals, the map whose zeros locate the two clusters of `(T/n, S_T/n)`,
//! the martingales of the coupled walk and binomial tail bounds.

mod limit;
mod martingale;
mod tail;

pub use limit::{f_map, limit_proportion, LimitPoint, DEFAULT_TOL, RESIDUAL_TARGET};
pub use martingale::{
    expected_next_m1, expected_next_m2, m1_value, m2_value, martingale_transform, variance_bound, MartingaleSeries,
};
pub use tail::{binomial_tail_bound, entropy_h, exact_binomial_tail, TailBoundQuery};
