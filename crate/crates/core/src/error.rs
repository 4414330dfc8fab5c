use thiserror::Error;

/// Errors raised by systems, tableaus, steppers and the harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite rate p[{i}][{j}] = {value} in system `{system}`")]
    NonFiniteRate {
        system: String,
        i: usize,
        j: usize,
        value: f64,
    },

    #[error("negative rate p[{i}][{j}] = {value} in system `{system}`")]
    NegativeRate {
        system: String,
        i: usize,
        j: usize,
        value: f64,
    },

    #[error("non-zero diagonal rate p[{i}][{i}] = {value} in system `{system}`")]
    NonZeroDiagonal {
        system: String,
        i: usize,
        value: f64,
    },

    #[error("state component {index} is not positive ({value})")]
    NonPositiveState { index: usize, value: f64 },

    #[error("system `{0}` has no closed-form solution")]
    NoExactSolution(String),

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid scheme identifier `{0}`")]
    InvalidScheme(String),

    #[error("scheme is not admissible: {0}")]
    InadmissibleScheme(String),

    #[error("singular matrix: pivot {pivot} in column {column}")]
    SingularMatrix { column: usize, pivot: f64 },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("step size underflow at t = {t} (h = {h}); the problem is likely stiff")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("maximum number of steps ({0}) exceeded")]
    TooManySteps(usize),

    #[error("trajectory grids differ: {0}")]
    GridMismatch(String),

    #[error("reference mean of component {0} is zero")]
    DegenerateReference(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
