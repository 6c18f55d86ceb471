use serde::Serialize;

use crate::error::{Error, Result};

/// Default bracket width for [`limit_proportion`].
pub const DEFAULT_TOL: f64 = 1e-12;

/// Largest `|g(y*)|` accepted before bisection stops early.
pub const RESIDUAL_TARGET: f64 = 1e-12;

/// The non-trivial zero `(x*, y*)` of [`f_map`] for a given budget `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitPoint {
    pub k: u64,
    /// Root in `(0, 1)` of `(k+1)(1 - y) + ln y`.
    pub y_star: f64,
    /// `(k+1)(1 - y*)`, the limit of `T/n` when the rumour takes off.
    pub x_star: f64,
    /// `(k+1)(1 - y*) + ln y*` at the returned root.
    pub residual: f64,
}

impl LimitPoint {
    /// `e^{-(k+1)}`, the large-`k` approximation of `y*`.
    pub fn asymptotic(&self) -> f64 {
        (-((self.k + 1) as f64)).exp()
    }
}

#[inline]
fn g(k1: f64, y: f64) -> f64 {
    k1 * (1.0 - y) + y.ln()
}

/// Solves `(k+1)(1 - y) = -ln y` on `(0, 1)` by bisection.
///
/// `g(y) = (k+1)(1-y) + ln y` is strictly concave with `g(1) = 0` and
/// `g'(1) = -k < 0`, so it is positive just below 1 and negative near 0 with
/// exactly one root in between. The lower end of the bracket is found by
/// halving from 0.5, the upper end by moving towards 1 from 0.5.
///
/// Bisection runs until the bracket is narrower than `tol` and the residual is
/// within [`RESIDUAL_TARGET`], or until the bracket cannot shrink further in
/// double precision.
pub fn limit_proportion(k: u64, tol: f64) -> Result<LimitPoint> {
    if k == 0 {
        return Err(Error::param("failure budget k must be at least 1"));
    }
    if !(tol > 0.0) {
        return Err(Error::param(format!("tolerance must be positive, got {tol}")));
    }
    let k1 = (k + 1) as f64;

    let mut lo = 0.5f64;
    while g(k1, lo) >= 0.0 {
        lo *= 0.5;
        if lo == 0.0 {
            return Err(Error::Bracket(format!("no negative value of g above 0 in double precision for k={k}")));
        }
    }
    let mut gap = 0.5f64;
    while g(k1, 1.0 - gap) <= 0.0 {
        gap *= 0.5;
        if gap < f64::EPSILON {
            return Err(Error::Bracket(format!("no positive value of g below 1 for k={k}")));
        }
    }
    let mut hi = 1.0 - gap;
    if lo >= hi {
        return Err(Error::Bracket(format!("empty bracket [{lo}, {hi}] for k={k}")));
    }

    let mut best = if g(k1, lo).abs() < g(k1, hi).abs() { lo } else { hi };
    loop {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(k1, mid);
        if gm.abs() < g(k1, best).abs() {
            best = mid;
        }
        if gm == 0.0 {
            break;
        }
        if gm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < tol && g(k1, best).abs() <= RESIDUAL_TARGET {
            break;
        }
    }

    Ok(LimitPoint { k, y_star: best, x_star: k1 * (1.0 - best), residual: g(k1, best) })
}

/// `f(x, y) = (x/(k+1) + y - 1, e^x y - 1)` on `[0, k+1] x [0, 1]`.
///
/// Its zeros are `(0, 1)` and `(x*, y*)`.
pub fn f_map(x: f64, y: f64, k: u64) -> (f64, f64) {
    (x / (k + 1) as f64 + y - 1.0, x.exp() * y - 1.0)
}
