//! Damped Newton minimization of `f_K(m, ·)` over the normalized angle domain.
//!
//! The last angle is pinned to `2π` and Newton runs on the remaining `n - 1`
//! coordinates. The full angle Hessian is positive semidefinite with kernel
//! spanned by `(1, …, 1)`, so its leading `(n-1) × (n-1)` block is positive
//! definite and Newton steps are well defined everywhere in the domain.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{CocircularError, Result};
use crate::geometry::{min_gap, regular_ngon, AngleConfiguration, MassVector};
use crate::potential::{f_k_raw, grad_theta_raw, hessian_theta_raw, AuxiliaryFunctional};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeOptions {
    /// Convergence when the reduced gradient norm is at most `tol_grad * max(1, |f|)`.
    pub tol_grad: f64,
    pub max_iter: usize,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    pub shrink: f64,
    /// Fraction of the distance to the ordering boundary a step may cover.
    pub boundary_fraction: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            tol_grad: 1e-11,
            max_iter: 200,
            armijo: 1e-4,
            shrink: 0.5,
            boundary_fraction: 0.9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizeResult {
    pub theta_m: AngleConfiguration,
    pub f_value: f64,
    /// Euclidean norm of the gradient in the `n - 1` free angles.
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `f_K` at the initial point followed by every accepted iterate.
    #[serde(skip)]
    pub history: Vec<f64>,
    /// Smallest circular gap over all accepted iterates.
    #[serde(skip)]
    pub min_gap_seen: f64,
}

/// Free coordinates `(θ_1, …, θ_{n-1})` of a normalized configuration.
pub fn reduced_coordinates(config: &AngleConfiguration) -> Result<Vec<f64>> {
    if !config.is_normalized() {
        return Err(CocircularError::Domain(
            "reduced coordinates need a configuration with last angle 2pi".into(),
        ));
    }
    let a = config.as_slice();
    Ok(a[..a.len() - 1].to_vec())
}

/// Inverse of [`reduced_coordinates`]: appends `θ_n = 2π` and validates.
pub fn from_reduced(free: &[f64]) -> Result<AngleConfiguration> {
    let mut angles = free.to_vec();
    angles.push(TAU);
    AngleConfiguration::new(angles)
}

/// `θ_m`, the unique minimizer of `f_K(m, ·)` with `θ_n = 2π`, using default options.
pub fn minimize_f_k(
    aux: &AuxiliaryFunctional,
    masses: &MassVector,
    init: Option<&AngleConfiguration>,
) -> Result<MinimizeResult> {
    minimize_f_k_with(aux, masses, init, &MinimizeOptions::default())
}

pub fn minimize_f_k_with(
    aux: &AuxiliaryFunctional,
    masses: &MassVector,
    init: Option<&AngleConfiguration>,
    opts: &MinimizeOptions,
) -> Result<MinimizeResult> {
    let n = masses.len();
    let start = match init {
        Some(c) => {
            if c.len() != n {
                return Err(CocircularError::Dimension {
                    expected: n,
                    got: c.len(),
                });
            }
            if !c.is_normalized() {
                return Err(CocircularError::Domain(
                    "initial configuration must have last angle exactly 2pi".into(),
                ));
            }
            c.clone()
        }
        None => regular_ngon(n)?,
    };
    let m = masses.as_slice();
    let mut theta = start.to_vec();
    let mut f = f_k_raw(aux, m, &theta);
    let mut history = vec![f];
    let mut gap_seen = min_gap(&theta);
    let mut iterations = 0;

    loop {
        let grad = grad_theta_raw(aux, m, &theta);
        let g = grad.rows(0, n - 1).into_owned();
        let grad_norm = g.norm();
        let tol = opts.tol_grad * f.abs().max(1.0);
        let converged = grad_norm <= tol;
        if converged || iterations >= opts.max_iter {
            let result = MinimizeResult {
                theta_m: AngleConfiguration::new(theta)?,
                f_value: f,
                grad_norm,
                iterations,
                converged,
                history,
                min_gap_seen: gap_seen,
            };
            return if converged {
                Ok(result)
            } else {
                Err(CocircularError::ConvergenceFailure(Box::new(result)))
            };
        }

        let hess = hessian_theta_raw(aux, m, &theta);
        let step = newton_direction(&hess, &g);
        let slope = g.dot(&step);

        let mut t = opts.boundary_fraction * max_feasible_step(&theta, &step);
        t = t.min(1.0);
        let mut trial = vec![0.0; n];
        let mut accepted = None;
        for _ in 0..80 {
            for i in 0..n - 1 {
                trial[i] = theta[i] + t * step[i];
            }
            trial[n - 1] = TAU;
            if min_gap(&trial) > 0.0 {
                let f_trial = f_k_raw(aux, m, &trial);
                if f_trial <= f + opts.armijo * t * slope {
                    accepted = Some(f_trial);
                    break;
                }
                // Predicted decrease below the resolution of f: near the
                // minimizer, where the full Newton step is the right move.
                if t == 1.0 && -slope <= 64.0 * f64::EPSILON * f.abs() {
                    if f_trial <= f + 4.0 * f64::EPSILON * f.abs() {
                        accepted = Some(f_trial);
                    }
                    break;
                }
            }
            t *= opts.shrink;
        }
        iterations += 1;
        match accepted {
            Some(f_trial) => {
                theta.copy_from_slice(&trial);
                f = f_trial;
                history.push(f);
                gap_seen = gap_seen.min(min_gap(&theta));
            }
            None => {
                // Line search stalled; the gradient check above decides the outcome.
                let grad = grad_theta_raw(aux, m, &theta);
                let grad_norm = grad.rows(0, n - 1).norm();
                let result = MinimizeResult {
                    theta_m: AngleConfiguration::new(theta)?,
                    f_value: f,
                    grad_norm,
                    iterations,
                    converged: false,
                    history,
                    min_gap_seen: gap_seen,
                };
                return Err(CocircularError::ConvergenceFailure(Box::new(result)));
            }
        }
    }
}

/// Solves the regularized reduced Newton system `H_r δ = -g`.
fn newton_direction(hess: &DMatrix<f64>, g: &DVector<f64>) -> DVector<f64> {
    let free = g.len();
    let mut reduced = hess.view((0, 0), (free, free)).into_owned();
    let shift = 1e-12 * reduced.trace() / (free + 1) as f64;
    for i in 0..free {
        reduced[(i, i)] += shift;
    }
    match reduced.clone().cholesky() {
        Some(chol) => -chol.solve(g),
        None => {
            // Roundoff broke definiteness: fall back to a scaled gradient step.
            let scale = reduced.diagonal().amax().max(f64::MIN_POSITIVE);
            -g / scale
        }
    }
}

/// Largest `t` such that `θ + t δ` keeps every circular gap nonnegative.
fn max_feasible_step(theta: &[f64], step: &DVector<f64>) -> f64 {
    let n = theta.len();
    let delta = |i: usize| if i + 1 < n { step[i] } else { 0.0 };
    let mut t_max = f64::INFINITY;
    // wrap-around gap θ_1 + 2π - θ_n = θ_1
    if delta(0) < 0.0 {
        t_max = t_max.min(theta[0] / -delta(0));
    }
    for i in 1..n {
        let change = delta(i) - delta(i - 1);
        if change < 0.0 {
            t_max = t_max.min((theta[i] - theta[i - 1]) / -change);
        }
    }
    t_max
}
