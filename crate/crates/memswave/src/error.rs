use thiserror::Error;

/// Errors shared across the solver and validation modules.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("evaluation point {0} lies outside [-1, 1]")]
    OutOfDomain(f64),

    #[error("mode index {k} must be below the truncation {m}")]
    ModeIndex { k: usize, m: usize },

    #[error("division by an interval containing zero")]
    IntervalDivByZero,

    #[error("Newton did not converge: residual {residual:.3e} after {iters} iterations")]
    NewtonDiverged { residual: f64, iters: usize },

    #[error("linear solve failed: matrix is singular to working precision")]
    SingularSystem,

    #[error("continuation step size fell below {ds_min:.3e}")]
    StepTooSmall { ds_min: f64 },

    #[error("unsupported eigenmode index {0} (expected 1, 2 or 3)")]
    UnsupportedMode(usize),

    #[error("no bifurcation point: squared frequency {omega_sq:.6} outside the eigenvalue range")]
    NoBifurcation { omega_sq: f64 },

    #[error("touchdown: membrane reached the ground plate (min U = {min_u:.6})")]
    Touchdown { min_u: f64 },

    #[error("radii polynomial has no negative value: {reason}")]
    ProofFailure { reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
