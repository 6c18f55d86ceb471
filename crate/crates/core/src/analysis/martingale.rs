use serde::Serialize;

use crate::error::{Error, Result};
use crate::walk::WalkState;

/// `ln(n/(n-1))`.
#[inline]
fn log_ratio(n: u64, shift: u64) -> f64 {
    -(-(shift as f64) / n as f64).ln_1p()
}

/// `M1(t) = (n/(n-1))^t s`.
#[inline]
pub fn m1_value(n: u64, t: u64, s: u64) -> f64 {
    (t as f64 * log_ratio(n, 1)).exp() * s as f64
}

/// `M2(t) = (n/(n-2))^t s (s-1)`.
#[inline]
pub fn m2_value(n: u64, t: u64, s: u64) -> f64 {
    let pairs = if s == 0 { 0.0 } else { s as f64 * (s - 1) as f64 };
    (t as f64 * log_ratio(n, 2)).exp() * pairs
}

/// `E[M1(t+1) | S~_t = s]` under one walk step.
pub fn expected_next_m1(n: u64, t: u64, s: u64) -> f64 {
    let down = s as f64 / n as f64;
    let lower = if s == 0 { 0.0 } else { m1_value(n, t + 1, s - 1) };
    (1.0 - down) * m1_value(n, t + 1, s) + down * lower
}

/// `E[M2(t+1) | S~_t = s]` under one walk step.
pub fn expected_next_m2(n: u64, t: u64, s: u64) -> f64 {
    let down = s as f64 / n as f64;
    let lower = if s == 0 { 0.0 } else { m2_value(n, t + 1, s - 1) };
    (1.0 - down) * m2_value(n, t + 1, s) + down * lower
}

/// Stopped martingales `M1(t ∧ T)` and `M2(t ∧ T)` along one walk path.
#[derive(Debug, Clone, Serialize)]
pub struct MartingaleSeries {
    pub values_m1: Vec<f64>,
    pub values_m2: Vec<f64>,
    pub stopped_at: u64,
}

impl MartingaleSeries {
    /// Value of the stopped processes at time `t` (frozen after `T`).
    pub fn at(&self, t: u64) -> (f64, f64) {
        let idx = t.min(self.stopped_at) as usize;
        (self.values_m1[idx], self.values_m2[idx])
    }
}

/// Evaluates both martingales on a walk path `S~_0, ..., S~_T`.
pub fn martingale_transform(trajectory: &[WalkState], n: u64) -> Result<MartingaleSeries> {
    if n <= 2 {
        return Err(Error::param(format!("M2 needs n > 2, got n={n}")));
    }
    let first = trajectory.first().ok_or_else(|| Error::param("empty trajectory"))?;
    if first.s_tilde != n - 1 || first.t != 0 {
        return Err(Error::param(format!("trajectory must start at (n-1, 0), got {first:?}")));
    }
    let (values_m1, values_m2) = trajectory
        .iter()
        .map(|st| (m1_value(n, st.t, st.s_tilde), m2_value(n, st.t, st.s_tilde)))
        .unzip();
    Ok(MartingaleSeries { values_m1, values_m2, stopped_at: trajectory.len() as u64 - 1 })
}

/// Asymptotic bound `(e^{k+1} - 1)(n-1)/n^2` on `Var{(n/(n-1))^T S~_T / n}`.
pub fn variance_bound(k: u64, n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::param(format!("variance bound needs n >= 2, got {n}")));
    }
    let nf = n as f64;
    Ok(((k + 1) as f64).exp_m1() * (nf - 1.0) / (nf * nf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ModelParams;
    use crate::rng::replicate_rng;
    use crate::walk::run_walk_traced;

    #[test]
    fn initial_values() {
        let n = 50;
        assert_eq!(m1_value(n, 0, n - 1), 49.0);
        assert_eq!(m2_value(n, 0, n - 1), 49.0 * 48.0);
    }

    #[test]
    fn one_step_expectation_is_preserved() {
        for n in [3u64, 10, 1000] {
            for s in 0..n.min(50) {
                for t in [0u64, 1, 7, 2 * n] {
                    let m1 = m1_value(n, t, s);
                    assert!((expected_next_m1(n, t, s) - m1).abs() <= 1e-12 * m1.max(1.0), "n={n} s={s} t={t}");
                    let m2 = m2_value(n, t, s);
                    assert!((expected_next_m2(n, t, s) - m2).abs() <= 1e-12 * m2.max(1.0), "n={n} s={s} t={t}");
                }
            }
        }
    }

    #[test]
    fn transform_of_a_walk_path() {
        let params = ModelParams::new(100, 2).unwrap();
        let (out, tr) = run_walk_traced(&params, &mut replicate_rng(4, 4), None).unwrap();
        let series = martingale_transform(&tr.to_vec(), 100).unwrap();
        assert_eq!(series.stopped_at, out.terminal_time);
        assert_eq!(series.values_m1[0], 99.0);
        assert!(series.values_m1.iter().chain(&series.values_m2).all(|v| v.is_finite() && *v >= 0.0));
        assert_eq!(series.at(out.terminal_time + 50), series.at(out.terminal_time));
    }

    #[test]
    fn transform_argument_checks() {
        let tr = [WalkState { s_tilde: 1, t: 0 }];
        assert!(martingale_transform(&tr, 2).is_err());
        assert!(martingale_transform(&[], 5).is_err());
        assert!(martingale_transform(&[WalkState { s_tilde: 3, t: 0 }], 5).is_err());
    }

    #[test]
    fn variance_bound_values() {
        let v = variance_bound(1, 10_000).unwrap();
        assert!((v - (2f64.exp() - 1.0) * 9999.0 / 1e8).abs() < 1e-15);
        assert!((v - 6.389e-4).abs() < 1e-6);
        assert!(variance_bound(1, 100_000).unwrap() < v);
        assert!(variance_bound(1, 1).is_err());
    }
}
