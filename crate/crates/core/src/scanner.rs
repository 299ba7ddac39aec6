//! The uniqueness condition `g(n, α) = (1/n) Σ_{j=1}^{n-1} csc^α(jπ/n) ≤ 1 + α/4`
//! over `(n, α)` grids, and the critical exponent where it becomes tight.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CocircularError, Result};
use crate::potential::inv_pow;
use crate::spectral::criterion_threshold;

/// First trial exponent of the bracket search.
pub const ALPHA_START: f64 = 1.0 / 64.0;
/// Largest exponent the bracket search reaches before giving up.
pub const ALPHA_MAX: f64 = 64.0;
pub const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionCell {
    pub n: usize,
    pub alpha: f64,
    pub g_value: f64,
    pub threshold: f64,
    pub holds: bool,
}

impl RegionCell {
    pub fn evaluate(n: usize, alpha: f64) -> Result<Self> {
        let g_value = g_value(n, alpha)?;
        let threshold = criterion_threshold(alpha);
        Ok(Self {
            n,
            alpha,
            g_value,
            threshold,
            holds: g_value <= threshold,
        })
    }
}

pub fn g_value(n: usize, alpha: f64) -> Result<f64> {
    if n < 3 {
        return Err(CocircularError::InvalidArity { min: 3, got: n });
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(CocircularError::UnsupportedExponent(alpha));
    }
    Ok(g_unchecked(n, alpha))
}

/// Terms `j` and `n - j` coincide, so each is evaluated once and doubled.
fn g_unchecked(n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    let mut sum = 0.0;
    for j in 1..=(n - 1) / 2 {
        sum += 2.0 * inv_pow((j as f64 * PI / nf).sin(), alpha);
    }
    if n.is_multiple_of(2) {
        sum += 1.0;
    }
    sum / nf
}

fn excess(n: usize, alpha: f64) -> f64 {
    g_unchecked(n, alpha) - criterion_threshold(alpha)
}

/// Every `(n, α)` cell with `n_min ≤ n ≤ n_max`, ordered by `n` then `α`.
pub fn scan_region(n_min: usize, n_max: usize, alphas: &[f64]) -> Result<Vec<RegionCell>> {
    if n_min < 3 {
        return Err(CocircularError::InvalidArity { min: 3, got: n_min });
    }
    if n_max < n_min {
        return Err(CocircularError::Domain(format!("empty range n = {n_min}..={n_max}")));
    }
    if let Some(&bad) = alphas.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
        return Err(CocircularError::UnsupportedExponent(bad));
    }
    let mut grid = alphas.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let pairs: Vec<(usize, f64)> = (n_min..=n_max)
        .flat_map(|n| grid.iter().map(move |&a| (n, a)))
        .collect();
    pairs.into_par_iter().map(|(n, a)| RegionCell::evaluate(n, a)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    /// For each `α`, cells that hold form an initial segment in `n`.
    pub holds_downward_closed: bool,
    pub increasing_in_n: bool,
    pub increasing_in_alpha: bool,
    pub violations: Vec<String>,
}

/// Checks the monotonicity claims over cells produced by [`scan_region`].
pub fn monotonicity(cells: &[RegionCell]) -> MonotonicityReport {
    let mut report = MonotonicityReport {
        holds_downward_closed: true,
        increasing_in_n: true,
        increasing_in_alpha: true,
        violations: Vec::new(),
    };
    let mut alphas: Vec<f64> = cells.iter().map(|c| c.alpha).collect();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    for &a in &alphas {
        let mut column: Vec<&RegionCell> = cells.iter().filter(|c| c.alpha == a).collect();
        column.sort_by_key(|c| c.n);
        for w in column.windows(2) {
            if w[1].g_value < w[0].g_value {
                report.increasing_in_n = false;
                report
                    .violations
                    .push(format!("g({}, {a}) > g({}, {a})", w[0].n, w[1].n));
            }
            if w[1].holds && !w[0].holds {
                report.holds_downward_closed = false;
                report
                    .violations
                    .push(format!("alpha {a}: holds at n={} but not at n={}", w[1].n, w[0].n));
            }
        }
    }
    let mut ns: Vec<usize> = cells.iter().map(|c| c.n).collect();
    ns.sort_unstable();
    ns.dedup();
    for &n in &ns {
        let mut row: Vec<&RegionCell> = cells.iter().filter(|c| c.n == n).collect();
        row.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
        for w in row.windows(2) {
            if w[1].g_value < w[0].g_value {
                report.increasing_in_alpha = false;
                report
                    .violations
                    .push(format!("g({n}, {}) > g({n}, {})", w[0].alpha, w[1].alpha));
            }
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaStar {
    pub n: usize,
    pub alpha: f64,
    /// `|g(n, α*) − 1 − α*/4|`
    pub residual: f64,
    pub iterations: usize,
}

/// Critical exponent where `g(n, α) = 1 + α/4`, by bracket doubling and bisection.
///
/// `g(n, α) − 1 − α/4` is convex in `α` and equals `−1/n` at `α = 0`, so
/// the root is unique.
pub fn alpha_star(n: usize, tol: f64) -> Result<AlphaStar> {
    if n < 3 {
        return Err(CocircularError::InvalidArity { min: 3, got: n });
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CocircularError::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let mut lo = 0.0;
    let mut hi = ALPHA_START;
    while excess(n, hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > ALPHA_MAX {
            return Err(CocircularError::NoBracket {
                alpha_hi: ALPHA_MAX,
                holds_everywhere: true,
            });
        }
    }
    let mut best = (f64::INFINITY, hi);
    for iteration in 1..=MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let f = excess(n, mid);
        if f.abs() < best.0 {
            best = (f.abs(), mid);
        }
        if f.abs() <= tol {
            return Ok(AlphaStar {
                n,
                alpha: mid,
                residual: f.abs(),
                iterations: iteration,
            });
        }
        if f > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if mid == lo && mid == hi {
            break;
        }
    }
    Err(CocircularError::Domain(format!(
        "bisection stalled at alpha = {} with residual {:e} above tolerance {tol:e}",
        best.1, best.0
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_examples() {
        let g6 = g_value(6, 1.0).unwrap();
        assert!((g6 - (5.0 / 6.0 + 2.0 * 3f64.sqrt() / 9.0)).abs() < 1e-12);
        assert!((g_value(3, 1.0).unwrap() - 4.0 / (3.0 * 3f64.sqrt())).abs() < 1e-15);
        assert!((g_value(4, 2.0).unwrap() - 1.25).abs() < 1e-15);
    }

    #[test]
    fn g_rejects_bad_input() {
        assert!(matches!(g_value(5, 0.0), Err(CocircularError::UnsupportedExponent(_))));
        assert!(matches!(g_value(2, 1.0), Err(CocircularError::InvalidArity { .. })));
    }

    #[test]
    fn newtonian_slice() {
        let cells = scan_region(3, 20, &[1.0]).unwrap();
        let holding: Vec<usize> = cells.iter().filter(|c| c.holds).map(|c| c.n).collect();
        assert_eq!(holding, vec![3, 4, 5, 6]);
        let square = RegionCell::evaluate(4, 2.0).unwrap();
        assert!(square.holds && square.threshold == 1.5);
    }

    #[test]
    fn small_alpha_always_holds() {
        for n in 3..40 {
            assert!(RegionCell::evaluate(n, 1e-4).unwrap().holds);
        }
    }

    #[test]
    fn scan_orders_cells() {
        let cells = scan_region(3, 5, &[2.0, 0.5, 1.0, 1.0]).unwrap();
        let keys: Vec<(usize, f64)> = cells.iter().map(|c| (c.n, c.alpha)).collect();
        assert_eq!(keys.len(), 9);
        assert_eq!(keys[0], (3, 0.5));
        assert_eq!(keys[2], (3, 2.0));
        assert_eq!(keys[8], (5, 2.0));
    }

    #[test]
    fn critical_exponents() {
        let six = alpha_star(6, 1e-12).unwrap();
        assert!(six.alpha > 1.0 && six.residual <= 1e-12);
        let seven = alpha_star(7, 1e-12).unwrap();
        assert!(seven.alpha < 1.0 && seven.residual <= 1e-12);
        assert!(alpha_star(7, 0.0).is_err());
    }
}
