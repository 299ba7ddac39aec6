//! The dihedral relabeling group `G = ⟨P, S⟩` acting on masses and angles,
//! and the exclusion tests built on it.
//!
//! `P` shifts labels cyclically, `(P m)_k = m_{k+1}`; `S` reverses the first
//! `n - 1` labels and fixes the last. Each element `g = P^h S^l` is paired
//! with an affine map `ĝ = 𝒫^h 𝒮^l` on angles that relabels, rotates or
//! reflects the bodies and then re-pins `θ_n = 2π`.
//!
//! At a centered co-circular CC, the change `f_K(y, θ_m) − f_K(m, θ_m)` for
//! any `y` with the same total mass equals `½ (y − m)ᵀ H (y − m)`, with `H`
//! the interaction matrix at `θ_m`. A relabeled vector `y = g m` can never
//! lower `f_K` below its minimum, so a negative quadratic form for some `g`
//! rules the CC out.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::Result;
use crate::geometry::{AngleConfiguration, MassVector};
use crate::minimizer::{minimize_f_k, MinimizeResult};
use crate::potential::{f_k_raw, grad_mass_raw, AuxiliaryFunctional};
use crate::spectral::{build_matrices, InteractionMatrix};
use crate::verifier::{verify_cc, DEFAULT_TOL};

/// Relative size of the strict decrease an exclusion must clear.
pub const MARGIN_REL: f64 = 1e-10;

/// Relative gap under which two witness decreases count as equal.
const TIE_REL: f64 = 1e-9;

/// `P^h S^l` in the dihedral group of order `2n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct GroupElement {
    n: usize,
    h: usize,
    l: usize,
}

impl GroupElement {
    pub fn new(n: usize, h: i64, l: i64) -> Self {
        Self {
            n,
            h: h.rem_euclid(n as i64) as usize,
            l: l.rem_euclid(2) as usize,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(n, 0, 0)
    }

    /// The cyclic shift `P`.
    pub fn p(n: usize) -> Self {
        Self::new(n, 1, 0)
    }

    /// The reversal `S`.
    pub fn s(n: usize) -> Self {
        Self::new(n, 0, 1)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn is_identity(&self) -> bool {
        self.h == 0 && self.l == 0
    }

    pub fn is_rotation(&self) -> bool {
        self.l == 0
    }

    /// Length of the shortest word in `P^{±1}` and `S` spelling this element.
    pub fn word_length(&self) -> usize {
        self.h.min(self.n - self.h) + self.l
    }

    /// `self · other`, using `S P = P^{-1} S`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "group elements of different order");
        let sign = if self.l == 0 { 1 } else { -1 };
        Self::new(self.n, self.h as i64 + sign * other.h as i64, (self.l + other.l) as i64)
    }

    pub fn inverse(&self) -> Self {
        if self.l == 0 {
            Self::new(self.n, -(self.h as i64), 0)
        } else {
            *self
        }
    }

    /// All `2n` elements: rotations `P^0 … P^{n-1}` first, then `P^h S`.
    pub fn all(n: usize) -> impl Iterator<Item = Self> {
        (0..2).flat_map(move |l| (0..n).map(move |h| Self::new(n, h as i64, l)))
    }

    /// 0-based source index: `(g y)_k = y_{source(k)}`.
    fn source(&self, k: usize) -> usize {
        let n = self.n as i64;
        // 1-based label k+1 maps to ±(k+1+h)
        let shifted = k as i64 + 1 + self.h as i64;
        let label = if self.l == 0 { shifted } else { -shifted };
        let label = label.rem_euclid(n);
        (if label == 0 { n } else { label } - 1) as usize
    }

    fn permute<T: Copy>(&self, values: &[T]) -> Vec<T> {
        (0..values.len()).map(|k| values[self.source(k)]).collect()
    }
}

impl std::fmt::Display for GroupElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.h, self.l) {
            (0, 0) => write!(f, "I"),
            (1, 0) => write!(f, "P"),
            (h, 0) => write!(f, "P^{h}"),
            (0, _) => write!(f, "S"),
            (1, _) => write!(f, "PS"),
            (h, _) => write!(f, "P^{h}S"),
        }
    }
}

/// `g m`.
pub fn act_on_masses(g: &GroupElement, masses: &MassVector) -> MassVector {
    assert_eq!(
        g.order(),
        masses.len(),
        "group order does not match the number of bodies"
    );
    MassVector::new(g.permute(masses.as_slice())).expect("a permutation of positive masses is positive")
}

/// `ĝ θ`; the input is normalized to `θ_n = 2π` first.
pub fn act_on_angles(g: &GroupElement, config: &AngleConfiguration) -> AngleConfiguration {
    assert_eq!(
        g.order(),
        config.len(),
        "group order does not match the number of bodies"
    );
    let mut theta = config.normalized().to_vec();
    if g.l == 1 {
        theta = reflect(&theta);
    }
    for _ in 0..g.h {
        theta = shift(&theta);
    }
    AngleConfiguration::new(theta).expect("the affine group action preserves the ordered domain")
}

/// `𝒫 θ = (θ_2 − θ_1, …, θ_n − θ_1, 2π)`.
fn shift(theta: &[f64]) -> Vec<f64> {
    let n = theta.len();
    let mut out: Vec<f64> = theta[1..].iter().map(|t| t - theta[0]).collect();
    out[n - 2] = TAU - theta[0];
    out.push(TAU);
    out
}

/// `𝒮 θ = (2π − θ_{n−1}, …, 2π − θ_1, 2π)`.
fn reflect(theta: &[f64]) -> Vec<f64> {
    let n = theta.len();
    let mut out: Vec<f64> = theta[..n - 1].iter().rev().map(|t| TAU - t).collect();
    out.push(TAU);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Group {
        element: GroupElement,
    },
    Swap {
        first: usize,
        second: usize,
        element: GroupElement,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExclusionVerdict {
    pub excluded: bool,
    pub witness: Option<Witness>,
    /// Strict decrease certified by the witness (zero when nothing is excluded).
    pub margin: f64,
    pub tol_margin: f64,
}

/// One relabeling `y = g m` evaluated at `θ_m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupCandidate {
    pub element: GroupElement,
    /// `½ (gm − m)ᵀ H (gm − m)`: the change of `f_K` a CC would force.
    pub predicted_change: f64,
    /// `f_K(gm, θ_m) − f_K(m, θ_m)` evaluated directly.
    pub direct_change: f64,
    /// Number of labels whose mass changes under `g`.
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupExclusion {
    pub verdict: ExclusionVerdict,
    pub minimum: MinimizeResult,
    pub f_value: f64,
    pub candidates: Vec<GroupCandidate>,
}

fn tol_margin(f_value: f64) -> f64 {
    MARGIN_REL * f_value.abs()
}

fn quadratic_change(h: &InteractionMatrix, d: &[f64]) -> f64 {
    0.5 * h.quadratic_form(d)
}

/// Scans all `2n` relabelings at `θ_m` for a negative quadratic form.
///
/// Among the firing elements, transposition-type relabelings (exactly two
/// labels change) are preferred as witnesses, then the largest decrease,
/// then the shortest word in `P` and `S`, then scan order.
pub fn exclusion_by_group(aux: &AuxiliaryFunctional, masses: &MassVector) -> Result<GroupExclusion> {
    let minimum = minimize_f_k(aux, masses, None)?;
    let (h, _) = build_matrices(aux, masses, &minimum.theta_m)?;
    let m = masses.as_slice();
    let theta = minimum.theta_m.as_slice();
    let f0 = f_k_raw(aux, m, theta);
    let tol = tol_margin(f0);

    let candidates: Vec<GroupCandidate> = GroupElement::all(m.len())
        .filter(|g| !g.is_identity())
        .map(|g| {
            let y = g.permute(m);
            let d: Vec<f64> = y.iter().zip(m).map(|(a, b)| a - b).collect();
            GroupCandidate {
                element: g,
                predicted_change: quadratic_change(&h, &d),
                direct_change: f_k_raw(aux, &y, theta) - f0,
                support: d.iter().filter(|x| **x != 0.0).count(),
            }
        })
        .collect();

    let best = pick_group_witness(&candidates, tol);
    let verdict = match best {
        Some(c) => ExclusionVerdict {
            excluded: true,
            witness: Some(Witness::Group { element: c.element }),
            margin: -c.predicted_change,
            tol_margin: tol,
        },
        None => ExclusionVerdict {
            excluded: false,
            witness: None,
            margin: 0.0,
            tol_margin: tol,
        },
    };
    Ok(GroupExclusion {
        verdict,
        minimum,
        f_value: f0,
        candidates,
    })
}

fn pick_group_witness(candidates: &[GroupCandidate], tol: f64) -> Option<&GroupCandidate> {
    let firing: Vec<&GroupCandidate> = candidates.iter().filter(|c| c.predicted_change < -tol).collect();
    let pool: Vec<&GroupCandidate> = if firing.iter().any(|c| c.support == 2) {
        firing.into_iter().filter(|c| c.support == 2).collect()
    } else {
        firing
    };
    let deepest = pool.iter().map(|c| c.predicted_change).fold(f64::INFINITY, f64::min);
    // equal decreases (up to rounding) arise from symmetric images of one exchange
    let tie = TIE_REL * deepest.abs();
    pool.into_iter()
        .filter(|c| c.predicted_change <= deepest + tie)
        .min_by_key(|c| c.element.word_length())
}

/// Exchange of two unequal masses evaluated at `θ_m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwapCandidate {
    pub first: usize,
    pub second: usize,
    /// `−(m_k − m_j)² (r_jk^{-α} + r_jk²/K)`
    pub closed_form: f64,
    /// `f_K(m', θ_m) − f_K(m, θ_m)` evaluated directly.
    pub direct_change: f64,
    /// `(m' − m) · ∇_m f_K`, which vanishes at a CC.
    pub linear_term: f64,
    /// Relabeling in `G` that realizes this exchange, if any.
    pub realized_by: Option<GroupElement>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwapExclusion {
    pub verdict: ExclusionVerdict,
    pub minimum: MinimizeResult,
    pub f_value: f64,
    pub candidates: Vec<SwapCandidate>,
    /// `θ_m` passes the CC check although a swap certificate excludes it.
    pub inconsistent: bool,
}

/// Evaluates every exchange of two unequal masses at `θ_m`.
///
/// An exchange certifies exclusion when it coincides with a relabeling in
/// `G` and its closed-form decrease clears the margin: a CC would then be
/// undercut by one of its own symmetric images.
pub fn exclusion_by_swap(aux: &AuxiliaryFunctional, masses: &MassVector) -> Result<SwapExclusion> {
    let minimum = minimize_f_k(aux, masses, None)?;
    let (h, _) = build_matrices(aux, masses, &minimum.theta_m)?;
    let m = masses.as_slice();
    let n = m.len();
    let theta = minimum.theta_m.as_slice();
    let f0 = f_k_raw(aux, m, theta);
    let grad = grad_mass_raw(aux, m, theta);
    let tol = tol_margin(f0);

    let images: Vec<(GroupElement, Vec<f64>)> = GroupElement::all(n).map(|g| (g, g.permute(m))).collect();

    let mut candidates = Vec::new();
    for j in 0..n {
        for k in (j + 1)..n {
            if m[j] == m[k] {
                continue;
            }
            let mut y = m.to_vec();
            y.swap(j, k);
            let diff = m[k] - m[j];
            candidates.push(SwapCandidate {
                first: j,
                second: k,
                closed_form: -diff * diff * h.get(j, k),
                direct_change: f_k_raw(aux, &y, theta) - f0,
                linear_term: diff * (grad[j] - grad[k]),
                realized_by: images.iter().find(|(_, img)| *img == y).map(|(g, _)| *g),
            });
        }
    }

    let best = candidates
        .iter()
        .filter(|c| c.realized_by.is_some() && c.closed_form < -tol)
        .min_by(|a, b| a.closed_form.total_cmp(&b.closed_form));
    let verdict = match best {
        Some(c) => ExclusionVerdict {
            excluded: true,
            witness: Some(Witness::Swap {
                first: c.first,
                second: c.second,
                element: c.realized_by.expect("filtered on realized swaps"),
            }),
            margin: -c.closed_form,
            tol_margin: tol,
        },
        None => ExclusionVerdict {
            excluded: false,
            witness: None,
            margin: 0.0,
            tol_margin: tol,
        },
    };
    let inconsistent = verdict.excluded && verify_cc(aux.alpha(), masses, &minimum.theta_m, DEFAULT_TOL)?.is_cc;
    Ok(SwapExclusion {
        verdict,
        minimum,
        f_value: f0,
        candidates,
        inconsistent,
    })
}
