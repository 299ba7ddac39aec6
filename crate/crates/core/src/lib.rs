//! Centered co-circular central configurations of the power-law n-body problem.
//!
//! Masses on the unit circle whose center of mass sits at the origin form a
//! central configuration exactly when the angles minimize the convex functional
//! `f_K = U_α + U_{-2}/K` and the mass gradient of `f_K` is constant. This crate
//! computes that minimizer, checks the equations, applies symmetry and
//! energy-ratio exclusion tests, and tabulates the `(n, α)` region where the
//! equal-mass regular polygon is the only such configuration.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod minimizer;
pub mod oracle;
pub mod potential;
pub mod scanner;
pub mod spectral;
pub mod symmetry;
pub mod verifier;

pub use error::{CocircularError, Result};
pub use geometry::{center_of_mass, chord_matrix, regular_ngon, AngleConfiguration, ChordMatrix, MassVector};
pub use minimizer::{
    from_reduced, minimize_f_k, minimize_f_k_with, reduced_coordinates, MinimizeOptions, MinimizeResult,
};
pub use potential::{
    evaluate, f_k_value, grad_mass_f_k, grad_theta_f_k, hessian_theta_f_k, k_threshold, u_beta, AuxiliaryFunctional,
    PotentialReport,
};
pub use scanner::{alpha_star, g_value, scan_region, AlphaStar, RegionCell};
pub use spectral::{
    build_matrices, circulant_spectrum, criterion_verdict, taylor_identity_check, CirculantSpectrum, CriterionMatrix,
    CriterionVerdict, InteractionMatrix,
};
pub use symmetry::{
    act_on_angles, act_on_masses, exclusion_by_group, exclusion_by_swap, ExclusionVerdict, GroupElement, Witness,
};
pub use verifier::{verify_cc, verify_definition_cc, CCReport};
