//! Modified Patankar-Runge-Kutta schemes for positive, conservative
//! production-destruction systems.
//!
//! The crate provides the system abstraction and built-in test problems
//! ([`pds`]), the third-order tableau families ([`tableau`]), the steppers
//! and fixed-grid driver ([`schemes`]), an adaptive reference solver
//! ([`reference`]) and the error/convergence harness ([`harness`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod linalg;
pub mod pds;
pub mod reference;
pub mod schemes;
pub mod tableau;
pub mod trajectory;

pub use error::{Error, Result};
pub use harness::{
    convergence_study, error_metric, feasibility_map, fit_slope, theorem1_diagnostics,
    ConvergenceReport, ConvergenceSetup, FeasibilityPoint, Theorem1Report,
};
pub use linalg::{lu_solve, mmatrix_solve, DenseMatrix, LuFactors};
pub use pds::{builtin, PDSystem, Problem, ProductionMatrix};
pub use reference::{reference_solve, ToleranceConfig};
pub use schemes::{
    geometric_grid, integrate, integrate_with_diagnostics, uniform_grid, Delta, Family, Integrator,
    SchemeSpec, Step, StepDiagnostics,
};
pub use tableau::{alpha0, feasible_case1, Tableau3};
pub use trajectory::Trajectory;
