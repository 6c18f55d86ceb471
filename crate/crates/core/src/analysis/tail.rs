use serde::Serialize;
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};

/// Arguments of the binomial upper-tail bound `P(Bin(trials, p) >= trials q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBoundQuery {
    trials: u64,
    p: f64,
    q: f64,
}

impl TailBoundQuery {
    /// Requires `0 < p < 1` and `p <= q <= 1`. `q = p` is the degenerate
    /// boundary where the bound equals 1.
    pub fn new(trials: u64, p: f64, q: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::param(format!("p must lie in (0, 1), got {p}")));
        }
        if !(q <= 1.0) {
            return Err(Error::param(format!("q must be at most 1, got {q}")));
        }
        if q < p {
            return Err(Error::param(format!("tail bound needs q >= p, got q={q} < p={p}")));
        }
        Ok(Self { trials, p, q })
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

/// `exp(-n [q ln(q/p) - q + p])`.
pub fn binomial_tail_bound(query: &TailBoundQuery) -> f64 {
    let TailBoundQuery { trials, p, q } = *query;
    if q == p {
        return 1.0;
    }
    let rate = q * (q / p).ln() - q + p;
    (-(trials as f64) * rate).exp()
}

/// Relative entropy of Bernoulli(q) with respect to Bernoulli(p), with
/// `0 ln 0 = 0`.
pub fn entropy_h(q: f64, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::param(format!("p must lie in (0, 1), got {p}")));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::param(format!("q must lie in [0, 1], got {q}")));
    }
    let head = if q == 0.0 { 0.0 } else { q * (q / p).ln() };
    let tail = if q == 1.0 { 0.0 } else { (1.0 - q) * ((1.0 - q) / (1.0 - p)).ln() };
    Ok(head + tail)
}

/// Exact `P(X >= ceil(n q))` for `X ~ Bin(n, p)`.
///
/// Terms are summed in log space from the smallest upward.
pub fn exact_binomial_tail(n: u64, p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("p must lie in [0, 1], got {p}")));
    }
    // absorb representation error in n*q, e.g. 10 * 0.3
    let raw = (n as f64 * q - 1e-9).ceil();
    if raw <= 0.0 {
        return Ok(1.0);
    }
    if raw > n as f64 {
        return Ok(0.0);
    }
    let threshold = raw as u64;
    if p == 0.0 {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    let mut logs: Vec<f64> = (threshold..=n)
        .map(|j| ln_binomial(n, j) + j as f64 * lp + (n - j) as f64 * lq)
        .collect();
    logs.sort_by(|a, b| a.total_cmp(b));
    let top = *logs.last().expect("non-empty tail");
    let scaled: f64 = logs.iter().map(|l| (l - top).exp()).sum();
    Ok((top.exp() * scaled).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> impl Iterator<Item = f64> {
        (1..20).map(|m| m as f64 / 20.0)
    }

    #[test]
    fn query_validation() {
        assert!(TailBoundQuery::new(5, 0.0, 0.5).is_err());
        assert!(TailBoundQuery::new(5, 0.5, 0.4).is_err());
        assert!(TailBoundQuery::new(5, 0.5, 1.2).is_err());
        assert!(TailBoundQuery::new(5, 0.5, 0.5).is_ok());
    }

    #[test]
    fn boundary_and_single_trial() {
        assert_eq!(binomial_tail_bound(&TailBoundQuery::new(40, 0.3, 0.3).unwrap()), 1.0);
        let b = binomial_tail_bound(&TailBoundQuery::new(1, 0.5, 1.0).unwrap());
        assert!((b - (-(2f64.ln() - 0.5)).exp()).abs() < 1e-15);
        assert!((b - 0.824).abs() < 1e-3);
        assert_eq!(exact_binomial_tail(1, 0.5, 1.0).unwrap(), 0.5);
    }

    #[test]
    fn exact_tail_edges() {
        assert_eq!(exact_binomial_tail(10, 0.3, 0.0).unwrap(), 1.0);
        assert_eq!(exact_binomial_tail(10, 0.0, 0.5).unwrap(), 0.0);
        assert_eq!(exact_binomial_tail(10, 1.0, 0.5).unwrap(), 1.0);
        assert!(exact_binomial_tail(10, 1.5, 0.5).is_err());
        // threshold ceil(10 * 0.3) = 3, not 4
        let direct: f64 = (3..=10u64)
            .map(|j| ln_binomial(10, j).exp() * 0.5f64.powi(10))
            .sum();
        assert!((exact_binomial_tail(10, 0.5, 0.3).unwrap() - direct).abs() < 1e-14);
    }

    #[test]
    fn exact_tail_against_direct_sum() {
        // n=20, p=0.3, threshold 10
        let mut direct = 0.0;
        for j in 10..=20u64 {
            direct += ln_binomial(20, j).exp() * 0.3f64.powi(j as i32) * 0.7f64.powi(20 - j as i32);
        }
        let exact = exact_binomial_tail(20, 0.3, 0.5).unwrap();
        assert!((exact - direct).abs() < 1e-15);
        assert!(exact <= binomial_tail_bound(&TailBoundQuery::new(20, 0.3, 0.5).unwrap()));
    }

    #[test]
    fn entropy_properties() {
        for p in grid() {
            assert!(entropy_h(p, p).unwrap().abs() < 1e-15);
            for q in grid().chain([1.0]) {
                let h = entropy_h(q, p).unwrap();
                assert!(h >= -1e-15);
                assert!(h >= q * (q / p).ln() - q + p - 1e-15);
            }
        }
        assert!(entropy_h(0.5, 0.0).is_err());
        assert!(entropy_h(0.5, 1.0).is_err());
        assert!((entropy_h(1.0, 0.5).unwrap() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn bounds_dominate_on_grid() {
        for n in [1u64, 5, 10, 50, 200] {
            for p in grid() {
                for q in grid().filter(|&q| q > p) {
                    let bound = binomial_tail_bound(&TailBoundQuery::new(n, p, q).unwrap());
                    let chernoff = (-(n as f64) * entropy_h(q, p).unwrap()).exp();
                    assert!(exact_binomial_tail(n, p, q).unwrap() <= bound, "n={n} p={p} q={q}");
                    assert!(chernoff <= bound * (1.0 + 1e-12), "n={n} p={p} q={q}");
                }
            }
        }
    }
}
