//! Power-law potentials on the unit circle and the convexified functional
//! `f_K = U_α + U_{-2}/K`, with analytic derivatives in angles and masses.
//!
//! All pair sums run over `j < k`; derivative contributions of a pair are
//! added to both endpoints with opposite signs, so gradient entries sum to
//! zero and Hessian rows sum to zero up to rounding.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{CocircularError, Result};
use crate::geometry::{check_same_len, AngleConfiguration, MassVector};

/// Smallest admissible `K` for exponent `alpha`, `2^(3+α)/α`.
pub fn k_threshold(alpha: f64) -> f64 {
    (3.0 + alpha).exp2() / alpha
}

/// `f_K = U_α + U_{-2}/K` with `α > 0` and `K ≥ 2^(3+α)/α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuxiliaryFunctional {
    alpha: f64,
    k: f64,
}

impl AuxiliaryFunctional {
    /// Uses the smallest admissible `K` unless `k` is given.
    pub fn new(alpha: f64, k: Option<f64>) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(CocircularError::UnsupportedExponent(alpha));
        }
        let min = k_threshold(alpha);
        let k = k.unwrap_or(min);
        // Admit values that only miss the threshold through rounding of 2^(3+α)/α.
        if !(k.is_finite() && k >= min * (1.0 - 4.0 * f64::EPSILON)) {
            return Err(CocircularError::KTooSmall { k, min });
        }
        Ok(Self { alpha, k })
    }

    pub fn with_default_k(alpha: f64) -> Result<Self> {
        Self::new(alpha, None)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Pair weight `r^{-α} + r²/K`.
    #[inline]
    pub fn pair_weight(&self, r: f64) -> f64 {
        inv_pow(r, self.alpha) + r * r / self.k
    }
}

/// `r^{-β}`: direct powers for small integer exponents, `exp(-β ln r)` otherwise.
#[inline]
pub(crate) fn inv_pow(r: f64, beta: f64) -> f64 {
    if beta.fract() == 0.0 && beta.abs() <= 6.0 {
        r.powi(-(beta as i32))
    } else {
        (-beta * r.ln()).exp()
    }
}

/// Values and derivatives of `f_K` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialReport {
    pub value: f64,
    pub grad_theta: DVector<f64>,
    pub grad_mass: DVector<f64>,
    pub hessian_theta: DMatrix<f64>,
}

/// `U_β = Σ_{j<k} m_j m_k r_jk^{-β}`.
pub fn u_beta(beta: f64, masses: &MassVector, config: &AngleConfiguration) -> Result<f64> {
    if beta == 0.0 || !beta.is_finite() {
        return Err(CocircularError::UnsupportedExponent(beta));
    }
    check_same_len(masses, config)?;
    Ok(u_beta_raw(beta, masses.as_slice(), config.as_slice()))
}

pub(crate) fn u_beta_raw(beta: f64, m: &[f64], theta: &[f64]) -> f64 {
    let n = m.len();
    let mut sum = 0.0;
    for j in 0..n {
        for k in (j + 1)..n {
            let s = (0.5 * (theta[k] - theta[j])).sin();
            let term = if beta == -2.0 {
                4.0 * s * s
            } else {
                inv_pow(2.0 * s.abs(), beta)
            };
            sum += m[j] * m[k] * term;
        }
    }
    sum
}

pub fn f_k_value(aux: &AuxiliaryFunctional, masses: &MassVector, config: &AngleConfiguration) -> Result<f64> {
    check_same_len(masses, config)?;
    Ok(f_k_raw(aux, masses.as_slice(), config.as_slice()))
}

pub(crate) fn f_k_raw(aux: &AuxiliaryFunctional, m: &[f64], theta: &[f64]) -> f64 {
    let n = m.len();
    let mut sum = 0.0;
    for j in 0..n {
        for k in (j + 1)..n {
            let r = 2.0 * (0.5 * (theta[k] - theta[j])).sin().abs();
            sum += m[j] * m[k] * aux.pair_weight(r);
        }
    }
    sum
}

pub fn grad_theta_f_k(
    aux: &AuxiliaryFunctional,
    masses: &MassVector,
    config: &AngleConfiguration,
) -> Result<DVector<f64>> {
    check_same_len(masses, config)?;
    Ok(grad_theta_raw(aux, masses.as_slice(), config.as_slice()))
}

pub(crate) fn grad_theta_raw(aux: &AuxiliaryFunctional, m: &[f64], theta: &[f64]) -> DVector<f64> {
    let n = m.len();
    let mut g = DVector::zeros(n);
    for j in 0..n {
        for k in (j + 1)..n {
            let d = theta[k] - theta[j];
            let r = 2.0 * (0.5 * d).sin().abs();
            let t = m[j] * m[k] * d.sin() * (aux.alpha * inv_pow(r, aux.alpha + 2.0) - 2.0 / aux.k);
            g[j] += t;
            g[k] -= t;
        }
    }
    g
}

pub fn hessian_theta_f_k(
    aux: &AuxiliaryFunctional,
    masses: &MassVector,
    config: &AngleConfiguration,
) -> Result<DMatrix<f64>> {
    check_same_len(masses, config)?;
    Ok(hessian_theta_raw(aux, masses.as_slice(), config.as_slice()))
}

pub(crate) fn hessian_theta_raw(aux: &AuxiliaryFunctional, m: &[f64], theta: &[f64]) -> DMatrix<f64> {
    let n = m.len();
    let alpha = aux.alpha;
    let mut h = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in (j + 1)..n {
            let half = 0.5 * (theta[k] - theta[j]);
            let r = 2.0 * half.sin().abs();
            let c2 = half.cos().powi(2);
            let off = m[j] * m[k] * (-alpha * (1.0 + alpha * c2) * inv_pow(r, alpha + 2.0) + (2.0 - 4.0 * c2) / aux.k);
            h[(j, k)] = off;
            h[(k, j)] = off;
            h[(j, j)] -= off;
            h[(k, k)] -= off;
        }
    }
    h
}

pub fn grad_mass_f_k(
    aux: &AuxiliaryFunctional,
    masses: &MassVector,
    config: &AngleConfiguration,
) -> Result<DVector<f64>> {
    check_same_len(masses, config)?;
    Ok(grad_mass_raw(aux, masses.as_slice(), config.as_slice()))
}

pub(crate) fn grad_mass_raw(aux: &AuxiliaryFunctional, m: &[f64], theta: &[f64]) -> DVector<f64> {
    let n = m.len();
    let mut g = DVector::zeros(n);
    for j in 0..n {
        for k in (j + 1)..n {
            let r = 2.0 * (0.5 * (theta[k] - theta[j])).sin().abs();
            let w = aux.pair_weight(r);
            g[j] += m[k] * w;
            g[k] += m[j] * w;
        }
    }
    g
}

/// Everything about `f_K` at `(masses, config)` in one pass over the inputs.
pub fn evaluate(
    aux: &AuxiliaryFunctional,
    masses: &MassVector,
    config: &AngleConfiguration,
) -> Result<PotentialReport> {
    check_same_len(masses, config)?;
    let (m, theta) = (masses.as_slice(), config.as_slice());
    Ok(PotentialReport {
        value: f_k_raw(aux, m, theta),
        grad_theta: grad_theta_raw(aux, m, theta),
        grad_mass: grad_mass_raw(aux, m, theta),
        hessian_theta: hessian_theta_raw(aux, m, theta),
    })
}
