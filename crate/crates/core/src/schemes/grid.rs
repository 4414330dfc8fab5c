use crate::error::{Error, Result};
use crate::pds::{check_dim, check_positive, PDSystem};
use crate::trajectory::Trajectory;

use super::steppers::Integrator;

/// Time levels with step sizes `dt0, ratio*dt0, ratio^2*dt0, ...` starting at
/// `t0`, stopping as soon as `t_end` is reached or passed. The last step is
/// not shortened, so the grid may end beyond `t_end`.
pub fn geometric_grid(t0: f64, dt0: f64, ratio: f64, t_end: f64) -> Result<Vec<f64>> {
    if !(dt0 > 0.0) || !dt0.is_finite() {
        return Err(Error::InvalidGrid(format!(
            "dt0 must be positive, got {dt0}"
        )));
    }
    if !(ratio > 1.0) || !ratio.is_finite() {
        return Err(Error::InvalidGrid(format!(
            "ratio must exceed 1, got {ratio}"
        )));
    }
    if !(t_end > t0) || !t_end.is_finite() || !t0.is_finite() {
        return Err(Error::InvalidGrid(format!(
            "need t_end > t0, got [{t0}, {t_end}]"
        )));
    }
    let mut grid = vec![t0];
    let mut t = t0;
    let mut dt = dt0;
    while t < t_end {
        t += dt;
        grid.push(t);
        dt *= ratio;
    }
    Ok(grid)
}

/// Uniform grid on `[t0, t_end]` with step `dt`; the final step is shortened
/// to land on `t_end` exactly unless `dt` divides the interval (to within
/// rounding).
pub fn uniform_grid(t0: f64, t_end: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidGrid(format!("dt must be positive, got {dt}")));
    }
    if !(t_end > t0) || !t_end.is_finite() || !t0.is_finite() {
        return Err(Error::InvalidGrid(format!(
            "need t_end > t0, got [{t0}, {t_end}]"
        )));
    }
    let ratio = (t_end - t0) / dt;
    let nearest = ratio.round();
    let steps = if (ratio - nearest).abs() <= 1e-9 * ratio.max(1.0) {
        nearest.max(1.0)
    } else {
        ratio.ceil()
    } as usize;
    let mut grid: Vec<f64> = (0..steps).map(|k| t0 + k as f64 * dt).collect();
    grid.push(t_end);
    Ok(grid)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("empty grid".into()));
    }
    if let Some(w) = grid.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidGrid(format!(
            "grid not strictly increasing at {} -> {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Advances `y0` over consecutive grid intervals.
pub fn integrate(
    sys: &dyn PDSystem,
    y0: &[f64],
    grid: &[f64],
    scheme: &dyn Integrator,
) -> Result<Trajectory> {
    run(sys, y0, grid, scheme, false)
}

/// Like [`integrate`] but keeps every step's diagnostics.
pub fn integrate_with_diagnostics(
    sys: &dyn PDSystem,
    y0: &[f64],
    grid: &[f64],
    scheme: &dyn Integrator,
) -> Result<Trajectory> {
    run(sys, y0, grid, scheme, true)
}

fn run(
    sys: &dyn PDSystem,
    y0: &[f64],
    grid: &[f64],
    scheme: &dyn Integrator,
    record: bool,
) -> Result<Trajectory> {
    check_grid(grid)?;
    check_dim(sys, y0)?;
    check_positive(y0)?;
    let mut traj = Trajectory::new(grid[0], y0.to_vec());
    let mut diags = record.then(|| Vec::with_capacity(grid.len() - 1));
    let mut y = y0.to_vec();
    for w in grid.windows(2) {
        let step = scheme.step(sys, &y, w[1] - w[0])?;
        y = step.state;
        traj.push(w[1], y.clone());
        if let Some(d) = diags.as_mut() {
            d.push(step.diagnostics);
        }
    }
    traj.diagnostics = diags;
    Ok(traj)
}
