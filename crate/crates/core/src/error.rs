use thiserror::Error;

use crate::minimizer::MinimizeResult;

pub type Result<T> = std::result::Result<T, CocircularError>;

#[derive(Debug, Error)]
pub enum CocircularError {
    #[error("bodies {first} and {second} collide (angular gap {gap:e} rad)")]
    Collision { first: usize, second: usize, gap: f64 },

    #[error("need at least {min} bodies, got {got}")]
    InvalidArity { min: usize, got: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("unsupported exponent {0} (logarithmic case is not handled)")]
    UnsupportedExponent(f64),

    #[error("K = {k} is below the convexity threshold 2^(3+alpha)/alpha = {min}")]
    KTooSmall { k: f64, min: f64 },

    #[error("mass {index} is not strictly positive: {value}")]
    NonPositiveMass { index: usize, value: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("Newton iteration did not converge after {} steps (gradient norm {:e})", .0.iterations, .0.grad_norm)]
    ConvergenceFailure(Box<MinimizeResult>),

    #[error("no sign change of g(n, alpha) - 1 - alpha/4 for alpha up to {alpha_hi}; condition {}", if *.holds_everywhere { "holds everywhere scanned" } else { "fails everywhere scanned" })]
    NoBracket { alpha_hi: f64, holds_everywhere: bool },

    #[error("brute-force oracle limited to n <= {max}, got {got}")]
    OracleScale { max: usize, got: usize },
}
