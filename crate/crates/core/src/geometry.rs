//! Masses, ordered angle configurations on the unit circle, and chord lengths.
//!
//! Bodies sit at `q_j = exp(i θ_j)`. An [`AngleConfiguration`] always satisfies
//! `0 < θ_1 < θ_2 < … < θ_n ≤ 2π`; the normalized form pins `θ_n = 2π`, which
//! removes the rotational freedom of the problem.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{CocircularError, Result};

/// Angular separation (radians) at or below which two bodies count as colliding.
pub const COLLISION_GAP: f64 = 1e-12;

/// Smallest number of bodies accepted by the domain types.
///
/// The antipodal two-body configuration is admitted so that the trivial
/// geometry checks stay expressible; solvers require at least three bodies.
pub const MIN_BODIES: usize = 2;

/// Positive masses `m_1, …, m_n` together with their total `M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassVector {
    masses: Vec<f64>,
    total_mass: f64,
}

impl MassVector {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.len() < MIN_BODIES {
            return Err(CocircularError::InvalidArity {
                min: MIN_BODIES,
                got: masses.len(),
            });
        }
        if let Some((index, &value)) = masses.iter().enumerate().find(|(_, m)| !(m.is_finite() && **m > 0.0)) {
            return Err(CocircularError::NonPositiveMass { index, value });
        }
        let total_mass = masses.iter().sum();
        Ok(Self { masses, total_mass })
    }

    /// `n` unit masses.
    pub fn equal(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.masses
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// True when every entry equals the first one exactly.
    pub fn all_equal(&self) -> bool {
        self.masses.iter().all(|&m| m == self.masses[0])
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.masses.clone()
    }
}

impl std::ops::Index<usize> for MassVector {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.masses[index]
    }
}

/// Strictly increasing angles in `(0, 2π]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct AngleConfiguration {
    angles: Vec<f64>,
}

impl AngleConfiguration {
    /// Validates membership in the ordered domain. Adjacent angles (including
    /// the wrap-around pair `θ_n`, `θ_1 + 2π`) closer than [`COLLISION_GAP`]
    /// are reported as a collision.
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        let n = angles.len();
        if n < MIN_BODIES {
            return Err(CocircularError::InvalidArity {
                min: MIN_BODIES,
                got: n,
            });
        }
        if let Some(bad) = angles.iter().find(|a| !a.is_finite()) {
            return Err(CocircularError::Domain(format!("non-finite angle {bad}")));
        }
        if angles[0] <= 0.0 || angles[n - 1] > TAU {
            return Err(CocircularError::Domain(format!(
                "angles must lie in (0, 2pi], got first {} and last {}",
                angles[0],
                angles[n - 1]
            )));
        }
        for k in 1..n {
            let gap = angles[k] - angles[k - 1];
            if gap < 0.0 {
                return Err(CocircularError::Domain(format!(
                    "angles must be increasing: theta[{}] = {} > theta[{}] = {}",
                    k - 1,
                    angles[k - 1],
                    k,
                    angles[k]
                )));
            }
            if gap <= COLLISION_GAP {
                return Err(CocircularError::Collision {
                    first: k - 1,
                    second: k,
                    gap,
                });
            }
        }
        let wrap = angles[0] + TAU - angles[n - 1];
        if wrap <= COLLISION_GAP {
            return Err(CocircularError::Collision {
                first: n - 1,
                second: 0,
                gap: wrap,
            });
        }
        Ok(Self { angles })
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.angles
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.angles.clone()
    }

    /// Whether `θ_n = 2π` holds exactly.
    pub fn is_normalized(&self) -> bool {
        self.angles[self.angles.len() - 1] == TAU
    }

    /// Rotates so that the last angle is exactly `2π`.
    pub fn normalized(&self) -> Self {
        let n = self.angles.len();
        let shift = TAU - self.angles[n - 1];
        let mut angles: Vec<f64> = self.angles.iter().map(|a| a + shift).collect();
        angles[n - 1] = TAU;
        Self { angles }
    }

    /// Adds `offset` to every angle; fails if the result leaves `(0, 2π]`.
    pub fn translated(&self, offset: f64) -> Result<Self> {
        Self::new(self.angles.iter().map(|a| a + offset).collect())
    }

    /// Smallest angular gap between neighbours on the circle.
    pub fn min_gap(&self) -> f64 {
        min_gap(&self.angles)
    }

    /// Points `exp(i θ_j)` on the unit circle.
    pub fn positions(&self) -> Vec<Complex64> {
        self.angles.iter().map(|&t| Complex64::from_polar(1.0, t)).collect()
    }
}

impl std::ops::Index<usize> for AngleConfiguration {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.angles[index]
    }
}

/// Smallest circular gap of an increasing angle sequence in `(0, 2π]`.
pub(crate) fn min_gap(angles: &[f64]) -> f64 {
    let n = angles.len();
    let inner = angles.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    inner.min(angles[0] + TAU - angles[n - 1])
}

/// Chord between two points of the unit circle separated by `delta` radians,
/// `|2 sin(delta / 2)|`.
#[inline]
pub fn chord(delta: f64) -> f64 {
    (2.0 * (0.5 * delta).sin()).abs()
}

/// Symmetric matrix of mutual distances `r_jk = |q_j - q_k|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChordMatrix {
    r: DMatrix<f64>,
}

impl ChordMatrix {
    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.r[(j, k)]
    }

    pub fn dim(&self) -> usize {
        self.r.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.r
    }
}

pub fn chord_matrix(config: &AngleConfiguration) -> ChordMatrix {
    let theta = config.as_slice();
    let n = theta.len();
    let mut r = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in (j + 1)..n {
            let d = chord(theta[j] - theta[k]);
            r[(j, k)] = d;
            r[(k, j)] = d;
        }
    }
    ChordMatrix { r }
}

/// `θ_j = 2πj/n` for `j = 1..n`, with `θ_n = 2π` exactly.
pub fn regular_ngon(n: usize) -> Result<AngleConfiguration> {
    if n < 3 {
        return Err(CocircularError::InvalidArity { min: 3, got: n });
    }
    let mut angles: Vec<f64> = (1..=n).map(|j| TAU * j as f64 / n as f64).collect();
    angles[n - 1] = TAU;
    AngleConfiguration::new(angles)
}

/// `(1/M) Σ m_j exp(i θ_j)`.
pub fn center_of_mass(masses: &MassVector, config: &AngleConfiguration) -> Result<Complex64> {
    check_same_len(masses, config)?;
    let sum: Complex64 = masses
        .as_slice()
        .iter()
        .zip(config.as_slice())
        .map(|(&m, &t)| Complex64::from_polar(m, t))
        .sum();
    Ok(sum / masses.total_mass())
}

pub(crate) fn check_same_len(masses: &MassVector, config: &AngleConfiguration) -> Result<()> {
    if masses.len() != config.len() {
        return Err(CocircularError::Dimension {
            expected: masses.len(),
            got: config.len(),
        });
    }
    Ok(())
}
