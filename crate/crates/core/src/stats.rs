//! Summary statistics and chi-square tests.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Adjacent categories are pooled until each bin expects at least this many.
pub const MIN_EXPECTED: f64 = 5.0;

/// Running mean and variance (Welford).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Summary {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Summary {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 { f64::NAN } else { self.mean }
    }

    /// Unbiased sample variance; zero for fewer than two observations.
    pub fn variance(&self) -> f64 {
        if self.count < 2 { 0.0 } else { (self.m2 / (self.count - 1) as f64).max(0.0) }
    }

    pub fn stderr(&self) -> f64 {
        if self.count == 0 { f64::NAN } else { (self.variance() / self.count as f64).sqrt() }
    }

    /// Normal-approximation 95% interval around the mean.
    pub fn ci95(&self) -> (f64, f64) {
        let half = 1.959_963_984_540_054 * self.stderr();
        (self.mean() - half, self.mean() + half)
    }
}

impl FromIterator<f64> for Summary {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Summary::default();
        iter.into_iter().for_each(|x| s.push(x));
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: u64,
    pub p_value: f64,
    pub bins: usize,
    pub alpha: f64,
    /// Observations that fell on zero-probability categories.
    pub impossible: u64,
    pub passed: bool,
}

fn p_value(statistic: f64, dof: u64) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    ChiSquared::new(dof as f64).expect("positive dof").sf(statistic)
}

/// Groups consecutive categories so that each group's weight reaches
/// `min_weight`; a short final group is folded into the previous one.
fn pool(weights: &[f64], min_weight: f64) -> Vec<std::ops::Range<usize>> {
    let mut groups = Vec::new();
    let (mut start, mut acc) = (0, 0.0);
    for (idx, &w) in weights.iter().enumerate() {
        acc += w;
        if acc >= min_weight {
            groups.push(start..idx + 1);
            start = idx + 1;
            acc = 0.0;
        }
    }
    if start < weights.len() {
        match groups.last_mut() {
            Some(last) => last.end = weights.len(),
            None => groups.push(start..weights.len()),
        }
    }
    groups
}

/// Goodness of fit of category counts to the given probabilities.
pub fn chi_square_gof(observed: &[u64], probs: &[f64], alpha: f64) -> ChiSquareTest {
    assert_eq!(observed.len(), probs.len(), "one probability per category");
    let total: u64 = observed.iter().sum();
    let impossible: u64 = observed.iter().zip(probs).filter(|(_, &p)| p <= 0.0).map(|(&o, _)| o).sum();
    let expected: Vec<f64> = probs.iter().map(|p| p * total as f64).collect();
    let groups = pool(&expected, MIN_EXPECTED);
    let statistic: f64 = groups
        .iter()
        .map(|g| {
            let o: u64 = observed[g.clone()].iter().sum();
            let e: f64 = expected[g.clone()].iter().sum();
            if e > 0.0 { (o as f64 - e).powi(2) / e } else { 0.0 }
        })
        .sum();
    let dof = groups.len().saturating_sub(1) as u64;
    let p = if impossible > 0 { 0.0 } else { p_value(statistic, dof) };
    ChiSquareTest { statistic, dof, p_value: p, bins: groups.len(), alpha, impossible, passed: p >= alpha }
}

/// Homogeneity test of two samples over the same categories.
pub fn chi_square_two_sample(a: &[u64], b: &[u64], alpha: f64) -> ChiSquareTest {
    assert_eq!(a.len(), b.len(), "samples must share categories");
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    let total = na + nb;
    let smaller = na.min(nb) / total;
    let pooled: Vec<f64> = a.iter().zip(b).map(|(&x, &y)| (x + y) as f64 * smaller).collect();
    let groups = pool(&pooled, MIN_EXPECTED);
    let statistic: f64 = groups
        .iter()
        .map(|g| {
            let oa: u64 = a[g.clone()].iter().sum();
            let ob: u64 = b[g.clone()].iter().sum();
            let col = (oa + ob) as f64;
            let (ea, eb) = (col * na / total, col * nb / total);
            let term = |o: u64, e: f64| if e > 0.0 { (o as f64 - e).powi(2) / e } else { 0.0 };
            term(oa, ea) + term(ob, eb)
        })
        .sum();
    let dof = groups.len().saturating_sub(1) as u64;
    let p = p_value(statistic, dof);
    ChiSquareTest { statistic, dof, p_value: p, bins: groups.len(), alpha, impossible: 0, passed: p >= alpha }
}
