//! Assembly and solution of the linear systems behind every Patankar stage.
//!
//! A stage with weighted production matrix `W` (a combination of production
//! matrices evaluated at earlier stages) and Patankar-weight denominators
//! `pwd` reads, component-wise,
//!
//! ```text
//! x_i = y_i + dt * sum_j ( W_ij * x_j / pwd_j  -  W_ji * x_i / pwd_i )
//! ```
//!
//! which is `M x = y` with `m_ii = 1 + dt * sum_j W_ji / pwd_i` and
//! `m_ij = -dt * W_ij / pwd_j`. Every column of `M` sums to one, so the
//! solution conserves the component sum of `y`. With explicit production
//! (`Coupling::Diagonal`) the off-diagonal part moves to the right-hand side
//! and the system decouples.

use crate::error::{Error, Result};
use crate::linalg::{mmatrix_solve, DenseMatrix};
use crate::pds::ProductionMatrix;

/// How production terms enter a stage equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    /// Production carries Patankar weights; full linear solve.
    Full,
    /// Production is explicit; diagonal solve.
    Diagonal,
}

/// Which solve of a step a recorded matrix belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixRole {
    Stage2,
    Stage3,
    /// The embedded second-order solve producing the final denominators.
    Sigma,
    Final,
}

/// An assembled Patankar matrix kept for inspection.
#[derive(Debug, Clone)]
pub struct MatrixRecord {
    pub role: MatrixRole,
    pub coupling: Coupling,
    pub matrix: DenseMatrix,
}

impl MatrixRecord {
    /// Largest `|sum_i m_ij - 1|` over the columns.
    pub fn column_sum_deviation(&self) -> f64 {
        self.matrix
            .column_sums()
            .iter()
            .fold(0.0, |m, s| m.max((s - 1.0).abs()))
    }

    /// Column-sum deviation measured against the magnitude of the summed entries.
    pub fn relative_column_sum_deviation(&self) -> f64 {
        self.matrix
            .column_sums()
            .iter()
            .zip(self.matrix.column_abs_sums())
            .fold(0.0, |m, (s, a)| m.max((s - 1.0).abs() / a.max(1.0)))
    }
}

/// Builds the stage matrix for `W`, `pwd` and `dt`.
pub fn assemble(
    dt: f64,
    weighted: &ProductionMatrix,
    pwd: &[f64],
    coupling: Coupling,
) -> DenseMatrix {
    let n = weighted.n();
    let mut m = DenseMatrix::identity(n);
    // column j holds the losses of constituent j, so the diagonal is 1 plus
    // the magnitudes of the off-diagonal entries below and above it
    for j in 0..n {
        let mut loss = 0.0;
        for i in 0..n {
            let w = weighted.get(i, j);
            if i != j && w != 0.0 {
                let v = dt * w / pwd[j];
                loss += v;
                if coupling == Coupling::Full {
                    m[(i, j)] = -v;
                }
            }
        }
        m[(j, j)] += loss;
    }
    m
}

/// Solves one Patankar stage and returns the new values together with the
/// assembled matrix. Values that underflow below the smallest positive
/// normal number are lifted to it; `clamped` counts how often.
pub fn solve_stage(
    dt: f64,
    y: &[f64],
    weighted: &ProductionMatrix,
    pwd: &[f64],
    coupling: Coupling,
    clamped: &mut usize,
) -> Result<(Vec<f64>, DenseMatrix)> {
    let m = assemble(dt, weighted, pwd, coupling);
    let mut x = match coupling {
        Coupling::Full => mmatrix_solve(&m, &vec![1.0; y.len()], y)?,
        Coupling::Diagonal => {
            let production = weighted.production_totals();
            (0..y.len())
                .map(|i| (y[i] + dt * production[i]) / m[(i, i)])
                .collect()
        }
    };
    for (index, v) in x.iter_mut().enumerate() {
        if v.is_nan() {
            return Err(Error::NonPositiveState { index, value: *v });
        }
        if *v < f64::MIN_POSITIVE {
            *v = f64::MIN_POSITIVE;
            *clamped += 1;
        }
    }
    Ok((x, m))
}

/// Denominators `y_i * (stage_i / y_i)^(1/exponent)`.
///
/// Component `i` depends on `y_i` and `stage_i` only.
pub fn geometric_pwd(y: &[f64], stage: &[f64], exponent: f64, clamped: &mut usize) -> Vec<f64> {
    let inv = 1.0 / exponent;
    y.iter()
        .zip(stage)
        .map(|(&yi, &si)| {
            let v = if inv == 1.0 {
                si
            } else {
                yi * (si / yi).powf(inv)
            };
            if v < f64::MIN_POSITIVE {
                *clamped += 1;
                f64::MIN_POSITIVE
            } else {
                v
            }
        })
        .collect()
}
