//! Spectral solvers and a computer-assisted saddle-node proof for the
//! membrane equation
//!
//! ```text
//! U_tt - U_yy + lambda / (1 + U)^2 = 0,   y in [-1, 1],   U(t, +-1) = 0.
//! ```
//!
//! Everything works in coefficient space. Steady states, eigenpairs of the
//! linearization and time-periodic solutions are zeros of polynomial maps on
//! Chebyshev (and Fourier-Chebyshev) coefficient sequences, located with
//! Newton's method and followed in `lambda` by pseudo-arclength continuation.
//! The fold of the steady branch is then enclosed rigorously: the augmented
//! saddle-node map is evaluated in outward-rounded interval arithmetic and a
//! radii-polynomial (Newton-Kantorovich) argument certifies a true zero
//! within an explicit radius of the numerical one.
//!
//! Modules:
//! - [`seqspace`]: Chebyshev coefficient sequences, weighted norms, discrete
//!   convolutions and the structural operators shared by all maps.
//! - [`interval`]: interval arithmetic with outward rounding.
//! - [`steady`]: the steady-state map, its Jacobian and Newton solver.
//! - [`eigen`]: coupled steady-state + eigenpair map with analytic seeding.
//! - [`periodic`]: time-periodic solutions in a cosine x Chebyshev basis.
//! - [`continuation`]: generic predictor-corrector arclength engine.
//! - [`validate`]: the saddle-node map, the approximate inverse operators
//!   and the four radii-polynomial bounds.

pub mod continuation;
pub mod eigen;
mod error;
pub mod interval;
pub mod matrix;
pub mod periodic;
pub mod scalar;
pub mod seqspace;
pub mod steady;
pub mod validate;

pub use error::Error;
pub use interval::Interval;
pub use scalar::Scalar;
pub use seqspace::{ChebSeq, Weight, WeightMode};

/// Crate-wide result type.
pub type Result<T> = core::result::Result<T, Error>;
