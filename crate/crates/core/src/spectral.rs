//! Interaction matrix `H`, the criterion matrix `ℋ = (2U_α/M² + 2/K) J − H`,
//! and the spectrum of `H` at the equal-mass regular polygon.
//!
//! `H_jk = r_jk^{-α} + r_jk²/K` off the diagonal and zero on it, so that
//! `½ yᵀ H y = f_K(y, θ)` for every mass vector `y`.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{CocircularError, Result};
use crate::geometry::{check_same_len, chord, AngleConfiguration, MassVector};
use crate::potential::{f_k_raw, u_beta_raw, AuxiliaryFunctional};
use crate::verifier::{verify_cc, DEFAULT_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct InteractionMatrix {
    h: DMatrix<f64>,
}

impl InteractionMatrix {
    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.h[(j, k)]
    }

    /// `yᵀ H y`, summed over `j < k` pairs.
    pub fn quadratic_form(&self, y: &[f64]) -> f64 {
        let n = y.len();
        let mut sum = 0.0;
        for j in 0..n {
            for k in (j + 1)..n {
                sum += y[j] * y[k] * self.h[(j, k)];
            }
        }
        2.0 * sum
    }

    /// `½ yᵀ H y`.
    pub fn h_m(&self, y: &[f64]) -> f64 {
        0.5 * self.quadratic_form(y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionMatrix {
    hcal: DMatrix<f64>,
    /// `2^{α+1} U_α / M²`
    pub u_ratio: f64,
    /// `1 + α/4`
    pub threshold: f64,
}

impl CriterionMatrix {
    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.hcal
    }
}

pub fn criterion_threshold(alpha: f64) -> f64 {
    1.0 + alpha / 4.0
}

pub fn build_matrices(
    aux: &AuxiliaryFunctional,
    masses: &MassVector,
    config: &AngleConfiguration,
) -> Result<(InteractionMatrix, CriterionMatrix)> {
    check_same_len(masses, config)?;
    let theta = config.as_slice();
    let n = theta.len();
    let mut h = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in (j + 1)..n {
            let w = aux.pair_weight(chord(theta[j] - theta[k]));
            h[(j, k)] = w;
            h[(k, j)] = w;
        }
    }
    let total = masses.total_mass();
    let u_alpha = u_beta_raw(aux.alpha(), masses.as_slice(), theta);
    let shift = 2.0 * u_alpha / (total * total) + 2.0 / aux.k();
    let hcal = DMatrix::from_element(n, n, shift) - &h;
    Ok((
        InteractionMatrix { h },
        CriterionMatrix {
            hcal,
            u_ratio: (aux.alpha() + 1.0).exp2() * u_alpha / (total * total),
            threshold: criterion_threshold(aux.alpha()),
        },
    ))
}

/// `|f_K(y, θ) − f_K(m, θ) − ½ (y − m)ᵀ H (y − m)|` at a central configuration
/// `(m, θ)` for `y` with the same total mass.
pub fn taylor_identity_check(
    aux: &AuxiliaryFunctional,
    masses_cc: &MassVector,
    config_cc: &AngleConfiguration,
    y: &MassVector,
) -> Result<f64> {
    check_same_len(masses_cc, config_cc)?;
    if y.len() != masses_cc.len() {
        return Err(CocircularError::Dimension {
            expected: masses_cc.len(),
            got: y.len(),
        });
    }
    let total = masses_cc.total_mass();
    if (y.total_mass() - total).abs() > 1e-12 * total {
        return Err(CocircularError::Domain(format!(
            "total mass of y ({}) differs from {}",
            y.total_mass(),
            total
        )));
    }
    let report = verify_cc(aux.alpha(), masses_cc, config_cc, DEFAULT_TOL)?;
    if !report.is_cc {
        return Err(CocircularError::Domain(
            "Taylor identity needs a verified central configuration".into(),
        ));
    }
    let (h, _) = build_matrices(aux, masses_cc, config_cc)?;
    let m = masses_cc.as_slice();
    let theta = config_cc.as_slice();
    let d: Vec<f64> = y.as_slice().iter().zip(m).map(|(a, b)| a - b).collect();
    let lhs = f_k_raw(aux, y.as_slice(), theta) - f_k_raw(aux, m, theta);
    Ok((lhs - h.h_m(&d)).abs())
}

/// Checkable facts about `𝓜 ℋ 𝓜` with `𝓜 = diag(m)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedCriterionFacts {
    /// Largest off-diagonal entry; nonpositive when the bound on `u_ratio` holds at a CC.
    pub max_off_diagonal: f64,
    /// `‖𝓜 ℋ 𝓜 1‖_∞`; zero at a CC.
    pub row_sum_residual: f64,
    pub diagonally_dominant: bool,
    /// Two smallest eigenvalues, ascending.
    pub smallest_eigenvalues: [f64; 2],
    /// Largest absolute eigenvalue.
    pub spectral_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionVerdict {
    pub u_ratio: f64,
    pub threshold: f64,
    pub masses_equal: bool,
    /// Unequal masses with `u_ratio ≤ threshold` at the test point.
    pub excluded: bool,
    /// `threshold − u_ratio`
    pub margin: f64,
    pub facts: WeightedCriterionFacts,
}

/// Tests `2^{α+1} U_α(m, φ) / M² ≤ 1 + α/4` at an arbitrary test point `φ`.
pub fn criterion_verdict(
    aux: &AuxiliaryFunctional,
    masses: &MassVector,
    config: &AngleConfiguration,
) -> Result<CriterionVerdict> {
    let (_, crit) = build_matrices(aux, masses, config)?;
    let masses_equal = masses.all_equal();
    Ok(CriterionVerdict {
        u_ratio: crit.u_ratio,
        threshold: crit.threshold,
        masses_equal,
        excluded: !masses_equal && crit.u_ratio <= crit.threshold,
        margin: crit.threshold - crit.u_ratio,
        facts: weighted_facts(&crit, masses),
    })
}

fn weighted_facts(crit: &CriterionMatrix, masses: &MassVector) -> WeightedCriterionFacts {
    let m = DVector::from_column_slice(masses.as_slice());
    let n = m.len();
    let weighted = DMatrix::from_fn(n, n, |i, j| m[i] * crit.hcal[(i, j)] * m[j]);
    let mut max_off = f64::NEG_INFINITY;
    let mut dominant = true;
    for i in 0..n {
        let mut off_abs = 0.0;
        for j in 0..n {
            if i != j {
                max_off = max_off.max(weighted[(i, j)]);
                off_abs += weighted[(i, j)].abs();
            }
        }
        dominant &= weighted[(i, i)] >= off_abs;
    }
    let row_sum_residual = weighted.column_sum().amax();
    let mut eig: Vec<f64> = weighted.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    let spectral_norm = eig.iter().fold(0.0f64, |a, e| a.max(e.abs()));
    WeightedCriterionFacts {
        max_off_diagonal: max_off,
        row_sum_residual,
        diagonally_dominant: dominant,
        smallest_eigenvalues: [eig[0], eig[1]],
        spectral_norm,
    }
}

/// Spectrum of `H` and `ℋ` for equal masses at the regular `n`-gon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CirculantSpectrum {
    pub n: usize,
    pub alpha: f64,
    pub k: f64,
    /// `c_{1j}`, the first row of `H`.
    pub first_row: Vec<f64>,
    /// `λ_k = Σ_j c_{1j} ξ_{k-1}^{j-1}`, `k = 1..n`.
    pub eigenvalues: Vec<f64>,
    /// Eigenvalues of `ℋ` on the same eigenvectors.
    pub criterion_eigenvalues: Vec<f64>,
    pub u_ratio: f64,
    pub threshold: f64,
}

impl CirculantSpectrum {
    /// Unit eigenvector `v_k = (ξ_{k-1}, ξ_{k-1}², …, ξ_{k-1}^n) / √n` (0-based `k`).
    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        let n = self.n;
        let scale = 1.0 / (n as f64).sqrt();
        (1..=n)
            .map(|p| Complex64::from_polar(scale, TAU * ((k * p) % n) as f64 / n as f64))
            .collect()
    }

    /// `ℋ` is positive semidefinite with a single zero eigenvalue, judged
    /// with margin `rel_margin · max|λ|`.
    pub fn criterion_psd_single_kernel(&self, rel_margin: f64) -> bool {
        let scale = self.eigenvalues.iter().fold(0.0f64, |a, e| a.max(e.abs()));
        let eps = rel_margin * scale;
        let zeros = self.criterion_eigenvalues.iter().filter(|e| e.abs() <= eps).count();
        let negatives = self.criterion_eigenvalues.iter().filter(|e| **e < -eps).count();
        zeros == 1 && negatives == 0
    }
}

pub fn circulant_spectrum(aux: &AuxiliaryFunctional, n: usize) -> Result<CirculantSpectrum> {
    if n < 3 {
        return Err(CocircularError::InvalidArity { min: 3, got: n });
    }
    let first_row: Vec<f64> = (0..n)
        .map(|j| {
            if j == 0 {
                0.0
            } else {
                aux.pair_weight(chord(TAU * j as f64 / n as f64))
            }
        })
        .collect();
    // c_{1,j} = c_{1,n+2-j}: pair the terms so the imaginary parts cancel exactly
    let eigenvalues: Vec<f64> = (0..n)
        .map(|k| {
            let mut sum = 0.0;
            for (j, &c) in first_row.iter().enumerate().skip(1) {
                if j < n - j {
                    sum += 2.0 * c * (TAU * ((k * j) % n) as f64 / n as f64).cos();
                } else if j == n - j {
                    sum += c * (PI * k as f64).cos();
                }
            }
            sum
        })
        .collect();
    let u_alpha = 0.5
        * n as f64
        * (1..n)
            .map(|j| crate::potential::inv_pow(chord(TAU * j as f64 / n as f64), aux.alpha()))
            .sum::<f64>();
    let nf = n as f64;
    let shift = 2.0 * u_alpha / (nf * nf) + 2.0 / aux.k();
    let criterion_eigenvalues: Vec<f64> = eigenvalues
        .iter()
        .enumerate()
        .map(|(k, lam)| if k == 0 { nf * shift - lam } else { -lam })
        .collect();
    Ok(CirculantSpectrum {
        n,
        alpha: aux.alpha(),
        k: aux.k(),
        first_row,
        eigenvalues,
        criterion_eigenvalues,
        u_ratio: (aux.alpha() + 1.0).exp2() * u_alpha / (nf * nf),
        threshold: criterion_threshold(aux.alpha()),
    })
}
