//! Projection methods for implicit convex feasibility problems.
//!
//! An implicit feasibility problem asks for a point `x` lying in every set
//! `C_s(x) = α_s U_s(Ω_s) + A_s x`, where each `Ω_s` is a fixed closed convex
//! core set with a cheap projection, `U_s` is orthogonal and `A_s` linear.
//! Projections onto the moving sets reduce to projections onto the core sets,
//! which gives a smooth convex proximity function whose minimizers are the
//! solutions. Two first-order methods are provided: a simultaneous gradient
//! method and a sequential, cyclically controlled one with β-steering steps.
//!
//! The [`denoise`] module applies this to grayscale images, constraining each
//! pixel to intervals spanned by its neighbors.

pub mod denoise;
mod error;
pub mod image;
pub mod linear;
pub mod pgm;
pub mod projection;
pub mod solver;
pub mod steering;
pub mod toy;
pub mod variable;
pub mod vector;

pub use error::{Error, Result};
pub use image::Image;
pub use linear::{
    operator_norm, AveragingStencil, DenseMatrix, Direction, LinearMap, OrthogonalMap,
};
pub use projection::{CoreSet, CoreSetKind};
pub use solver::{
    solve, Algorithm, IcfpInstance, IterationTrace, NoMetrics, Observer, SolveConfig, StepSize,
    TraceRecord,
};
pub use steering::SteeringSpec;
pub use variable::{lipschitz_constant, make_k, project_variable, VariableSet};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
