//! Brute-force references for checking the fast paths in tests.
//!
//! Nothing here is used by the solvers or the CLI.

use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::error::{CocircularError, Result};
use crate::geometry::{AngleConfiguration, MassVector};
use crate::potential::{f_k_raw, AuxiliaryFunctional};

/// Largest `n` the grid search accepts (an `(n-1)`-dimensional grid).
pub const MAX_ORACLE_BODIES: usize = 5;

/// Points per axis in refinement rounds; the box half-width is 8 fine spacings.
const REFINE_HALF_STEPS: i64 = 8;

/// Re-centering passes allowed per round when the incumbent sits on the box edge.
const MAX_RECENTER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    /// Points per angle dimension in the coarse pass.
    pub resolution: usize,
    pub refinement_rounds: usize,
}

impl GridSpec {
    pub fn new(resolution: usize, refinement_rounds: usize) -> Result<Self> {
        if resolution < 8 {
            return Err(CocircularError::Domain(format!(
                "grid resolution {resolution} is below 8"
            )));
        }
        Ok(Self {
            resolution,
            refinement_rounds,
        })
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            resolution: 64,
            refinement_rounds: 6,
        }
    }
}

/// Minimizes `f_K(m, ·)` over the normalized domain by exhaustive grid search.
///
/// The coarse pass visits every strictly increasing tuple of the uniform grid
/// `2πi/resolution`. Each refinement round shrinks the box around the
/// incumbent by 4× and searches a local grid with spacing a quarter of the
/// previous one. Ties go to the lexicographically smallest angles.
pub fn brute_minimize(aux: &AuxiliaryFunctional, masses: &MassVector, grid: GridSpec) -> Result<AngleConfiguration> {
    let n = masses.len();
    if n > MAX_ORACLE_BODIES {
        return Err(CocircularError::OracleScale {
            max: MAX_ORACLE_BODIES,
            got: n,
        });
    }
    if n < 3 {
        return Err(CocircularError::InvalidArity { min: 3, got: n });
    }
    let grid = GridSpec::new(grid.resolution, grid.refinement_rounds)?;
    let m = masses.as_slice();
    let free = n - 1;
    let eval = |x: &[f64]| -> f64 {
        let mut theta = x.to_vec();
        theta.push(TAU);
        if !strictly_ordered(&theta) {
            return f64::INFINITY;
        }
        f_k_raw(aux, m, &theta)
    };

    let coarse = TAU / grid.resolution as f64;
    let tuples = ordered_tuples(grid.resolution - 1, free);
    let (_, mut best) = tuples
        .par_iter()
        .map(|idx| {
            let x: Vec<f64> = idx.iter().map(|&i| (i + 1) as f64 * coarse).collect();
            (eval(&x), x)
        })
        .reduce_with(better)
        .expect("grid has at least one ordered tuple");

    let mut spacing = coarse;
    for _ in 0..grid.refinement_rounds {
        spacing /= 4.0;
        for _ in 0..MAX_RECENTER {
            let offsets = local_offsets(free);
            let (_, candidate, on_edge) = offsets
                .par_iter()
                .map(|off| {
                    let x: Vec<f64> = best.iter().zip(off).map(|(b, &o)| b + o as f64 * spacing).collect();
                    let edge = off.iter().any(|o| o.abs() == REFINE_HALF_STEPS);
                    (eval(&x), x, edge)
                })
                .reduce_with(|a, b| {
                    let (fa, xa, ea) = a;
                    let (fb, xb, eb) = b;
                    let ((f, x), from_a) = if better_ref((fa, &xa), (fb, &xb)) {
                        ((fa, xa), true)
                    } else {
                        ((fb, xb), false)
                    };
                    (f, x, if from_a { ea } else { eb })
                })
                .expect("local grid is nonempty");
            best = candidate;
            if !on_edge {
                break;
            }
        }
    }
    let mut theta = best;
    theta.push(TAU);
    AngleConfiguration::new(theta)
}

fn strictly_ordered(theta: &[f64]) -> bool {
    theta[0] > 0.0 && theta.windows(2).all(|w| w[1] > w[0])
}

fn better(a: (f64, Vec<f64>), b: (f64, Vec<f64>)) -> (f64, Vec<f64>) {
    if better_ref((a.0, &a.1), (b.0, &b.1)) {
        a
    } else {
        b
    }
}

/// Smaller value wins; equal values fall back to lexicographic angle order.
fn better_ref(a: (f64, &[f64]), b: (f64, &[f64])) -> bool {
    match a.0.total_cmp(&b.0) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => {
            for (x, y) in a.1.iter().zip(b.1) {
                match x.total_cmp(y) {
                    std::cmp::Ordering::Less => return true,
                    std::cmp::Ordering::Greater => return false,
                    std::cmp::Ordering::Equal => {}
                }
            }
            true
        }
    }
}

/// Strictly increasing index tuples of length `len` drawn from `0..count`.
fn ordered_tuples(count: usize, len: usize) -> Vec<Vec<usize>> {
    fn extend(start: usize, count: usize, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in start..count {
            cur.push(i);
            extend(i + 1, count, len, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    extend(0, count, len, &mut Vec::with_capacity(len), &mut out);
    out
}

/// Every offset vector in `[-REFINE_HALF_STEPS, REFINE_HALF_STEPS]^dim`.
fn local_offsets(dim: usize) -> Vec<Vec<i64>> {
    let side = 2 * REFINE_HALF_STEPS + 1;
    let total = (side as usize).pow(dim as u32);
    (0..total)
        .map(|mut code| {
            (0..dim)
                .map(|_| {
                    let digit = (code % side as usize) as i64;
                    code /= side as usize;
                    digit - REFINE_HALF_STEPS
                })
                .collect()
        })
        .collect()
}

/// Central differences `(f(x + h e_i) − f(x − h e_i)) / 2h`.
pub fn finite_difference_gradient<F>(f: F, point: &[f64], step: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut x = point.to_vec();
    (0..point.len())
        .map(|i| {
            x[i] = point[i] + step;
            let plus = f(&x);
            x[i] = point[i] - step;
            let minus = f(&x);
            x[i] = point[i];
            (plus - minus) / (2.0 * step)
        })
        .collect()
}
