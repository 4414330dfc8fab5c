//! Modified Patankar-Runge-Kutta steppers and the fixed-grid driver.

mod grid;
pub mod patankar;
mod spec;
mod steppers;

pub use grid::{geometric_grid, integrate, integrate_with_diagnostics, uniform_grid};
pub use patankar::{Coupling, MatrixRecord, MatrixRole};
pub use spec::{Delta, Family, Mprk43Params, SchemeSpec};
pub use steppers::{mpe_step, mprk22_step, mprk43_step, Integrator, Step, StepDiagnostics};
