//! Residuals of the centered co-circular central-configuration equations.
//!
//! With bodies on the unit circle the equations split into a tangential
//! group `Σ_{j≠k} m_j sin(θ_j − θ_k) / r_jk^{α+2} = 0`, a radial group
//! `Σ_{j≠k} m_j / r_jk^α = λ̃` (same value for every `k`), and the centering
//! condition `Σ m_j q_j = 0`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{CocircularError, Result};
use crate::geometry::{center_of_mass, check_same_len, AngleConfiguration, MassVector};
use crate::potential::{inv_pow, u_beta_raw};

pub const DEFAULT_TOL: f64 = 1e-9;

/// Largest allowed deviation of `|q|` from 1 for planar input.
pub const ON_CIRCLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CCReport {
    /// `max_k |Σ_{j≠k} m_j sin(θ_j − θ_k) / r_jk^{α+2}|`
    pub tangential_residual: f64,
    /// `max_k − min_k` of the radial sums `Σ_{j≠k} m_j / r_jk^α`
    pub radial_spread: f64,
    /// `|Σ m_j q_j| / M`
    pub center_norm: f64,
    /// Mean of the radial sums.
    pub lambda_tilde: f64,
    /// `2 U_α / M`, the value `lambda_tilde` must match at a central configuration.
    pub lambda_energy: f64,
    pub tol: f64,
    pub is_cc: bool,
}

impl CCReport {
    fn from_sums(tangential: &[f64], radial: &[f64], center_norm: f64, lambda_energy: f64, tol: f64) -> Self {
        let tangential_residual = tangential.iter().fold(0.0f64, |acc, t| acc.max(t.abs()));
        let hi = radial.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = radial.iter().copied().fold(f64::INFINITY, f64::min);
        let radial_spread = hi - lo;
        let lambda_tilde = radial.iter().sum::<f64>() / radial.len() as f64;
        let is_cc = tangential_residual <= tol && radial_spread <= tol && center_norm <= tol;
        Self {
            tangential_residual,
            radial_spread,
            center_norm,
            lambda_tilde,
            lambda_energy,
            tol,
            is_cc,
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(CocircularError::UnsupportedExponent(alpha));
    }
    Ok(())
}

/// Evaluates the three equation groups in angle form.
pub fn verify_cc(alpha: f64, masses: &MassVector, config: &AngleConfiguration, tol: f64) -> Result<CCReport> {
    check_alpha(alpha)?;
    check_same_len(masses, config)?;
    let m = masses.as_slice();
    let theta = config.as_slice();
    let n = m.len();
    let mut tangential = vec![0.0; n];
    let mut radial = vec![0.0; n];
    for j in 0..n {
        for k in (j + 1)..n {
            let d = theta[j] - theta[k];
            let r = 2.0 * (0.5 * d).sin().abs();
            let inv_a = inv_pow(r, alpha);
            let tan = d.sin() * inv_a / (r * r);
            // row k sees sin(θ_j − θ_k), row j sees sin(θ_k − θ_j)
            tangential[k] += m[j] * tan;
            tangential[j] -= m[k] * tan;
            radial[k] += m[j] * inv_a;
            radial[j] += m[k] * inv_a;
        }
    }
    let center_norm = center_of_mass(masses, config)?.norm();
    let lambda_energy = 2.0 * u_beta_raw(alpha, m, theta) / masses.total_mass();
    Ok(CCReport::from_sums(
        &tangential,
        &radial,
        center_norm,
        lambda_energy,
        tol,
    ))
}

/// Evaluates the planar central-configuration equation directly from
/// positions `q_k` on the unit circle.
///
/// The acceleration `F_k = Σ_{j≠k} m_j (q_j − q_k) / |q_j − q_k|^{α+2}` is
/// resolved along `q_k`: its normal part must vanish and
/// `−2 Re(F_k q̄_k)` must be the same for every body.
pub fn verify_definition_cc(alpha: f64, masses: &MassVector, positions: &[Complex64], tol: f64) -> Result<CCReport> {
    check_alpha(alpha)?;
    let n = masses.len();
    if positions.len() != n {
        return Err(CocircularError::Dimension {
            expected: n,
            got: positions.len(),
        });
    }
    if let Some((k, q)) = positions
        .iter()
        .enumerate()
        .find(|(_, q)| !q.norm().is_finite() || (q.norm() - 1.0).abs() > ON_CIRCLE_TOL)
    {
        return Err(CocircularError::Domain(format!(
            "position {k} = {q} is not on the unit circle"
        )));
    }
    let m = masses.as_slice();
    let mut force = vec![Complex64::new(0.0, 0.0); n];
    let mut energy = 0.0;
    for j in 0..n {
        for k in (j + 1)..n {
            let diff = positions[j] - positions[k];
            let r = diff.norm();
            if r <= crate::geometry::COLLISION_GAP {
                return Err(CocircularError::Collision {
                    first: j,
                    second: k,
                    gap: r,
                });
            }
            let inv_a = inv_pow(r, alpha);
            let pull = diff * (inv_a / (r * r));
            force[k] += pull * m[j];
            force[j] -= pull * m[k];
            energy += m[j] * m[k] * inv_a;
        }
    }
    let along: Vec<Complex64> = force.iter().zip(positions).map(|(f, q)| f * q.conj()).collect();
    let tangential: Vec<f64> = along.iter().map(|w| w.im).collect();
    let radial: Vec<f64> = along.iter().map(|w| -2.0 * w.re).collect();
    let total = masses.total_mass();
    let center: Complex64 = m.iter().zip(positions).map(|(&mj, q)| q * mj).sum();
    Ok(CCReport::from_sums(
        &tangential,
        &radial,
        center.norm() / total,
        2.0 * energy / total,
        tol,
    ))
}
