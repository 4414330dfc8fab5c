//! High-accuracy reference solutions for non-stiff problems.
//!
//! Dormand-Prince 5(4) with a standard step-size controller. Steps are cut to
//! land exactly on every requested output time, so results can be compared
//! with fixed-grid runs without interpolation.

use crate::error::{Error, Result};
use crate::pds::{check_dim, eval_rhs_unsigned, PDSystem};
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    pub abstol: f64,
    pub reltol: f64,
}

impl ToleranceConfig {
    pub fn new(abstol: f64, reltol: f64) -> Result<Self> {
        if !(abstol > 0.0 && reltol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerances must be positive, got abstol={abstol}, reltol={reltol}"
            )));
        }
        Ok(Self { abstol, reltol })
    }

    pub fn uniform(tol: f64) -> Result<Self> {
        Self::new(tol, tol)
    }
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            abstol: 1e-10,
            reltol: 1e-10,
        }
    }
}

/// Upper bound on accepted plus rejected steps of one solve.
pub const MAX_STEPS: usize = 500_000;

// Dormand-Prince 5(4) coefficients; the systems are autonomous so the nodes are unused.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Solves `sys` from `output_times[0]` and records the state at every output time.
pub fn reference_solve(
    sys: &dyn PDSystem,
    y0: &[f64],
    output_times: &[f64],
    tol: ToleranceConfig,
) -> Result<Trajectory> {
    check_dim(sys, y0)?;
    let Some(&t0) = output_times.first() else {
        return Err(Error::InvalidGrid("no output times".into()));
    };
    if let Some(w) = output_times.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidGrid(format!(
            "output times not strictly increasing at {} -> {}",
            w[0], w[1]
        )));
    }
    let mut traj = Trajectory::new(t0, y0.to_vec());
    if output_times.len() == 1 {
        return Ok(traj);
    }

    let n = y0.len();
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    k[0] = eval_rhs_unsigned(sys, &y)?;
    let span = output_times[output_times.len() - 1] - t0;
    let mut h = initial_step(&y, &k[0], tol, span);
    let mut steps = 0usize;
    let mut stage = vec![0.0; n];
    let mut y_new = vec![0.0; n];

    for &t_out in &output_times[1..] {
        while t < t_out {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::TooManySteps(MAX_STEPS));
            }
            let remaining = t_out - t;
            let lands = h >= remaining;
            let h_try = if lands { remaining } else { h };
            if !(h_try > 16.0 * f64::EPSILON * t.abs()) {
                return Err(Error::StepSizeUnderflow { t, h: h_try });
            }

            for s in 1..7 {
                for i in 0..n {
                    let mut acc = 0.0;
                    for (j, a) in A[s][..s].iter().enumerate() {
                        acc += a * k[j][i];
                    }
                    stage[i] = y[i] + h_try * acc;
                }
                k[s] = eval_rhs_unsigned(sys, &stage)?;
            }
            // the seventh stage point is the fifth-order solution
            y_new.copy_from_slice(&stage);

            let mut err = 0.0f64;
            for i in 0..n {
                let e: f64 = h_try * (0..7).map(|s| E[s] * k[s][i]).sum::<f64>();
                let sc = tol.abstol + tol.reltol * y[i].abs().max(y_new[i].abs());
                err = err.max(e.abs() / sc);
            }
            if !err.is_finite() {
                h = h_try * 0.2;
                continue;
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                t = if lands { t_out } else { t + h_try };
                std::mem::swap(&mut y, &mut y_new);
                k.swap(0, 6);
                // keep the unclipped step size when only the boundary shortened it
                h = if lands {
                    h.max(h_try * factor)
                } else {
                    h_try * factor
                };
            } else {
                h = h_try * factor.min(1.0);
            }
        }
        traj.push(t_out, y.clone());
    }
    Ok(traj)
}

fn initial_step(y: &[f64], f: &[f64], tol: ToleranceConfig, span: f64) -> f64 {
    let mut d0 = 0.0f64;
    let mut d1 = 0.0f64;
    for (yi, fi) in y.iter().zip(f) {
        let sc = tol.abstol + tol.reltol * yi.abs();
        d0 = d0.max(yi.abs() / sc);
        d1 = d1.max(fi.abs() / sc);
    }
    let h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h.min(span.abs())
}
