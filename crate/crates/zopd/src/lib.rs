//! Zeroth-order primal-dual optimization.
//!
//! This crate solves composite problems of the form
//!
//! ```text
//! min  f(x) + h(x)    s.t.  A x = b,  x ∈ X
//! ```
//!
//! where `f` is smooth but possibly nonconvex and only observable through a
//! noisy value oracle, `h` is convex nonsmooth with a cheap proximity
//! operator, and `X` is a closed convex set. The main solver is PZO-PDA, a
//! proximal zeroth-order primal-dual method that builds a stochastic gradient
//! surrogate from finite differences along random directions and alternates a
//! proximal primal step with a perturbed dual ascent step.
//!
//! The crate also ships two gradient-free baselines (RGF and ZO-SGD), a
//! networked sparse-PCA benchmark generator, diagnostics for the solver's
//! optimality gap and potential function, and a config-driven experiment
//! harness with CSV output and SVG plots (see the `zopd` binary).

// Negated comparisons like `!(x > 0.0)` are used on purpose so that NaN
// counts as a violated condition.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod diagnostics;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod linalg;
pub mod pca;
pub mod problem;
pub mod solver;

pub use error::Error;
pub use estimator::{GradientEstimate, SmoothingConfig};
pub use problem::{FeasibleSet, LinearConstraint, NonsmoothTerm, ProblemInstance, SmoothOracle};
pub use solver::{RunOutput, ScalingMode, SolverParams};
