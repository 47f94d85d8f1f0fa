//! Numerical laboratory for the mixed quadratic-quartic functional equation
//!
//! ```text
//! f(nx+y) + f(nx-y) = n^2 f(x+y) + n^2 f(x-y) + 2 f(nx) - 2 n^2 f(x) - 2 (n^2 - 1) f(y)
//! ```
//!
//! on p-normed target spaces (0 < p <= 1). The crate evaluates residuals,
//! decomposes solutions into their quadratic and quartic parts, runs the
//! dyadic approximation scheme for near-solutions, and certifies stability
//! bounds: closed-form constants, truncated series, and a full grid
//! certification pipeline.

pub mod bounds;
pub mod config;
pub mod equation;
pub mod error;
pub mod grid;
pub mod hyers;
pub mod perturb;
pub mod pnorm;
pub mod runner;

pub use bounds::{
    admissible_direction, certify, corollary_bound, corollary_constant,
    corollary_quart_power_y_as_printed, series_budget, series_budget_truncated, step_budget,
    step_budget_power, theorem_bound, theorem_bound_truncated, BoundFlavor, BoundParams,
    CertificationReport, ClosedFormKind, IterBudget, Perturbation, PerturbationKind,
};
pub use config::RunConfig;
pub use grid::GridSpec;
pub use equation::{
    biadditive_form, identity_probe, identity_residual, polarize_quartic, quad_transform,
    quart_transform, recompose, residual, residual_probe, EquationParams, FormSolution, Identity,
    PolySolution, Probe, SampleFn,
};
pub use error::{Error, Result};
pub use hyers::{
    approximant, homogeneity_check, mixed_decomposition, ApproximantResult, Component, Direction,
    IterationConfig, MixedParts,
};
pub use perturb::{empirical_theta, make_exact, make_perturbed, NoiseShape, NoiseSpec};
pub use pnorm::{estimate_modulus, ineq_holds, ineq_slack, power_sum_check, QuasiNormSpec, YVector};
