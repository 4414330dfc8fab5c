//! Error metric, convergence studies, order-condition diagnostics and
//! feasibility maps.

use std::io::{self, Write};
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::pds::{eval_rhs, PDSystem};
use crate::reference::{reference_solve, ToleranceConfig};
use crate::schemes::{integrate, uniform_grid, Integrator};
use crate::tableau::{feasible_case1, Tableau3};
use crate::trajectory::{fmt_real, Trajectory};

/// Tolerance used for reference solutions of problems without a closed form.
pub const REFERENCE_TOL: f64 = 1e-10;

/// Mean over constituents of the per-constituent relative RMS error.
///
/// For constituent `i`, the root mean square difference over the executed
/// steps (all levels except the initial one) is divided by the mean of the
/// reference values over the same steps.
pub fn error_metric(reference: &Trajectory, numeric: &Trajectory) -> Result<f64> {
    if reference.times.len() != numeric.times.len() {
        return Err(Error::GridMismatch(format!(
            "{} vs {} time levels",
            reference.times.len(),
            numeric.times.len()
        )));
    }
    for (a, b) in reference.times.iter().zip(&numeric.times) {
        if (a - b).abs() > 1e-12 * a.abs().max(1.0) {
            return Err(Error::GridMismatch(format!("time {a} vs {b}")));
        }
    }
    if reference.steps() == 0 {
        return Err(Error::GridMismatch("no executed steps".into()));
    }
    let n = reference.dim();
    if numeric.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: numeric.dim(),
        });
    }
    let m = reference.steps() as f64;
    let mut total = 0.0;
    for i in 0..n {
        let mut mean = 0.0;
        let mut sq = 0.0;
        for (r, y) in reference.states[1..].iter().zip(&numeric.states[1..]) {
            mean += r[i];
            sq += (r[i] - y[i]).powi(2);
        }
        mean /= m;
        if mean == 0.0 {
            return Err(Error::DegenerateReference(i));
        }
        total += (sq / m).sqrt() / mean.abs();
    }
    Ok(total / n as f64)
}

/// Least-squares slope of `ln(err)` against `ln(dt)`. `None` when fewer than
/// two points are given or any error is zero or non-finite.
pub fn fit_slope(dts: &[f64], errors: &[f64]) -> Option<f64> {
    if dts.len() != errors.len() || dts.len() < 2 {
        return None;
    }
    if errors.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
        return None;
    }
    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Problem data and refinement sequence of a convergence study.
#[derive(Clone, Copy)]
pub struct ConvergenceSetup<'a> {
    pub system: &'a dyn PDSystem,
    pub initial: &'a [f64],
    pub t0: f64,
    pub t_end: f64,
    pub dt0: f64,
    pub levels: usize,
}

impl ConvergenceSetup<'_> {
    /// `dt0 / 2^k` for `k = 0..levels`.
    pub fn step_sizes(&self) -> Vec<f64> {
        (0..self.levels)
            .map(|k| self.dt0 / f64::powi(2.0, k as i32))
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.levels < 3 {
            return Err(Error::InvalidParameter(format!(
                "a convergence study needs at least 3 levels, got {}",
                self.levels
            )));
        }
        Ok(())
    }

    /// Reference trajectory on every level's grid: the closed form when the
    /// system has one, otherwise an adaptive solve at [`REFERENCE_TOL`]
    /// landing on the finest grid, subsampled for the coarser ones.
    pub fn references(&self) -> Result<Vec<Trajectory>> {
        self.validate()?;
        let grids = self
            .step_sizes()
            .into_iter()
            .map(|dt| uniform_grid(self.t0, self.t_end, dt))
            .collect::<Result<Vec<_>>>()?;
        if self.system.has_exact() {
            return grids
                .iter()
                .map(|grid| {
                    let mut tr = Trajectory::new(grid[0], self.initial.to_vec());
                    for &t in &grid[1..] {
                        let y = crate::pds::exact_solution(self.system, t - self.t0, self.initial)?;
                        tr.push(t, y);
                    }
                    Ok(tr)
                })
                .collect();
        }
        let finest = grids.last().expect("levels >= 3");
        let fine = reference_solve(
            self.system,
            self.initial,
            finest,
            ToleranceConfig::uniform(REFERENCE_TOL)?,
        )?;
        grids.iter().map(|grid| subsample(&fine, grid)).collect()
    }
}

fn subsample(fine: &Trajectory, grid: &[f64]) -> Result<Trajectory> {
    let mut out = Trajectory::new(grid[0], fine.states[0].clone());
    let mut j = 0;
    for &t in &grid[1..] {
        while j < fine.times.len() && fine.times[j] < t {
            j += 1;
        }
        if j == fine.times.len() || fine.times[j] != t {
            return Err(Error::GridMismatch(format!(
                "time {t} is not a level of the reference grid"
            )));
        }
        out.push(t, fine.states[j].clone());
    }
    Ok(out)
}

/// Outcome of a convergence study.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub scheme: String,
    pub problem: String,
    pub dts: Vec<f64>,
    pub errors: Vec<f64>,
    /// Observed order over all levels.
    pub slope: Option<f64>,
    pub runtimes: Vec<Duration>,
}

impl ConvergenceReport {
    /// Observed order fitted over levels `0..=k`, for every `k`.
    pub fn cumulative_slopes(&self) -> Vec<Option<f64>> {
        (0..self.dts.len())
            .map(|k| fit_slope(&self.dts[..=k], &self.errors[..=k]))
            .collect()
    }

    /// `dt,E,slope_cumulative` CSV; the slope column is empty where undefined.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "dt,E,slope_cumulative")?;
        for ((dt, e), s) in self
            .dts
            .iter()
            .zip(&self.errors)
            .zip(self.cumulative_slopes())
        {
            let s = s.map(fmt_real).unwrap_or_default();
            writeln!(out, "{},{},{}", fmt_real(*dt), fmt_real(*e), s)?;
        }
        Ok(())
    }
}

pub fn convergence_study(
    setup: &ConvergenceSetup<'_>,
    scheme: &dyn Integrator,
) -> Result<ConvergenceReport> {
    let refs = setup.references()?;
    convergence_study_against(setup, scheme, &refs)
}

/// Convergence study against precomputed per-level references, as returned
/// by [`ConvergenceSetup::references`].
pub fn convergence_study_against(
    setup: &ConvergenceSetup<'_>,
    scheme: &dyn Integrator,
    references: &[Trajectory],
) -> Result<ConvergenceReport> {
    setup.validate()?;
    let dts = setup.step_sizes();
    if references.len() != dts.len() {
        return Err(Error::GridMismatch(format!(
            "{} references for {} levels",
            references.len(),
            dts.len()
        )));
    }
    let mut errors = Vec::with_capacity(dts.len());
    let mut runtimes = Vec::with_capacity(dts.len());
    for reference in references {
        let start = Instant::now();
        let numeric = integrate(setup.system, setup.initial, &reference.times, scheme)?;
        runtimes.push(start.elapsed());
        errors.push(error_metric(reference, &numeric)?);
    }
    Ok(ConvergenceReport {
        scheme: scheme.label(),
        problem: setup.system.name().to_string(),
        slope: fit_slope(&dts, &errors),
        dts,
        errors,
        runtimes,
    })
}

/// Required observed orders of the diagnostic quantities.
pub const RHO_MIN_SLOPE: f64 = 0.9;
pub const WEIGHT_SUM_MIN_SLOPE: f64 = 1.9;
pub const SIGMA_MIN_SLOPE: f64 = 2.9;

/// Per-step quantities checked against the third-order conditions on the
/// Patankar-weight denominators, one entry per step size.
#[derive(Debug, Clone)]
pub struct Theorem1Report {
    pub dts: Vec<f64>,
    /// `max_i |pi_i - y_i|`
    pub pi_dev: Vec<f64>,
    /// `max_i |rho_i - y_i|`
    pub rho_dev: Vec<f64>,
    /// Deviation of the weighted stage-ratio sum from 1/2.
    pub weight_sum_dev: Vec<f64>,
    /// `max_i |sigma_i - y_i(t0 + dt)|`
    pub sigma_err: Vec<f64>,
}

impl Theorem1Report {
    pub fn rho_slope(&self) -> Option<f64> {
        fit_slope(&self.dts, &self.rho_dev)
    }

    pub fn weight_sum_slope(&self) -> Option<f64> {
        fit_slope(&self.dts, &self.weight_sum_dev)
    }

    pub fn sigma_slope(&self) -> Option<f64> {
        fit_slope(&self.dts, &self.sigma_err)
    }

    pub fn pi_exact(&self) -> bool {
        self.pi_dev.iter().all(|&d| d == 0.0)
    }

    pub fn rho_ok(&self) -> bool {
        slope_ok(self.rho_slope(), &self.rho_dev, RHO_MIN_SLOPE)
    }

    pub fn weight_sum_ok(&self) -> bool {
        slope_ok(
            self.weight_sum_slope(),
            &self.weight_sum_dev,
            WEIGHT_SUM_MIN_SLOPE,
        )
    }

    pub fn sigma_ok(&self) -> bool {
        slope_ok(self.sigma_slope(), &self.sigma_err, SIGMA_MIN_SLOPE)
    }

    pub fn passes(&self) -> bool {
        self.pi_exact() && self.rho_ok() && self.weight_sum_ok() && self.sigma_ok()
    }

    pub fn write_summary<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "dt,pi_dev,rho_dev,weight_sum_dev,sigma_err")?;
        for k in 0..self.dts.len() {
            writeln!(
                out,
                "{},{},{},{},{}",
                fmt_real(self.dts[k]),
                fmt_real(self.pi_dev[k]),
                fmt_real(self.rho_dev[k]),
                fmt_real(self.weight_sum_dev[k]),
                fmt_real(self.sigma_err[k])
            )?;
        }
        let show = |s: Option<f64>| s.map_or("undefined".to_string(), |v| format!("{v:.3}"));
        let verdict = |ok: bool| if ok { "ok" } else { "FAIL" };
        writeln!(out, "(a) pi = y exactly: {}", verdict(self.pi_exact()))?;
        writeln!(
            out,
            "(b) rho slope {} (need >= {RHO_MIN_SLOPE}): {}",
            show(self.rho_slope()),
            verdict(self.rho_ok())
        )?;
        writeln!(
            out,
            "(c) weight-sum slope {} (need >= {WEIGHT_SUM_MIN_SLOPE}): {}",
            show(self.weight_sum_slope()),
            verdict(self.weight_sum_ok())
        )?;
        writeln!(
            out,
            "(d) sigma slope {} (need >= {SIGMA_MIN_SLOPE}): {}",
            show(self.sigma_slope()),
            verdict(self.sigma_ok())
        )
    }
}

fn slope_ok(slope: Option<f64>, values: &[f64], min: f64) -> bool {
    match slope {
        Some(s) => s >= min,
        None => values.iter().all(|&v| v == 0.0),
    }
}

/// Runs one step per `dt` from `(t0, y0)` and measures how the denominators
/// behave as the step shrinks.
pub fn theorem1_diagnostics(
    sys: &dyn PDSystem,
    y0: &[f64],
    scheme: &dyn Integrator,
    dts: &[f64],
) -> Result<Theorem1Report> {
    let t: Tableau3 = scheme.tableau().ok_or_else(|| {
        Error::InadmissibleScheme(format!("{} has no three-stage tableau", scheme.label()))
    })?;
    let f = eval_rhs(sys, y0)?;
    let (c2, c3) = (t.c2(), t.c3());
    let mut report = Theorem1Report {
        dts: dts.to_vec(),
        pi_dev: Vec::new(),
        rho_dev: Vec::new(),
        weight_sum_dev: Vec::new(),
        sigma_err: Vec::new(),
    };
    let missing =
        |what: &str| Error::InvalidParameter(format!("{} does not report {what}", scheme.label()));
    for &dt in dts {
        let d = scheme.step(sys, y0, dt)?.diagnostics;
        let pi = d
            .pwd_pi
            .as_ref()
            .ok_or_else(|| missing("stage-2 denominators"))?;
        let rho = d
            .pwd_rho
            .as_ref()
            .ok_or_else(|| missing("stage-3 denominators"))?;
        let truth = match sys.exact(dt, y0) {
            Some(y) => y,
            None => reference_solve(sys, y0, &[0.0, dt], ToleranceConfig::uniform(1e-13)?)?
                .final_state()
                .to_vec(),
        };
        let mut pi_dev = 0.0f64;
        let mut rho_dev = 0.0f64;
        let mut ws_dev = 0.0f64;
        let mut sigma_err = 0.0f64;
        for i in 0..y0.len() {
            pi_dev = pi_dev.max((pi[i] - y0[i]).abs());
            rho_dev = rho_dev.max((rho[i] - y0[i]).abs());
            let ws = t.b2 * c2 * (y0[i] + c2 * dt * f[i]) / pi[i]
                + t.b3 * c3 * (y0[i] + c3 * dt * f[i]) / rho[i];
            ws_dev = ws_dev.max((ws - 0.5).abs());
            sigma_err = sigma_err.max((d.pwd_sigma[i] - truth[i]).abs());
        }
        report.pi_dev.push(pi_dev);
        report.rho_dev.push(rho_dev);
        report.weight_sum_dev.push(ws_dev);
        report.sigma_err.push(sigma_err);
    }
    Ok(report)
}

/// One sample of the case I feasibility map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityPoint {
    pub alpha: f64,
    pub beta: f64,
    pub feasible: bool,
    /// Whether the point lies on the circle where `b2 = b3`.
    pub b2_eq_b3: bool,
}

/// Distance to the `b2 = b3` circle below which a point is marked.
pub const CIRCLE_TOL: f64 = 1e-6;

pub fn on_b2_eq_b3_circle(alpha: f64, beta: f64) -> bool {
    let r = ((alpha - 1.0 / 3.0).powi(2) + (beta - 1.0 / 3.0).powi(2)).sqrt();
    (r - std::f64::consts::SQRT_2 / 3.0).abs() <= CIRCLE_TOL
}

/// Samples `[alpha_min, alpha_max] x [beta_min, beta_max]` with `resolution`
/// intervals per axis, i.e. `(resolution + 1)^2` points, alpha-major.
pub fn feasibility_map(
    alpha: (f64, f64),
    beta: (f64, f64),
    resolution: usize,
) -> Result<Vec<FeasibilityPoint>> {
    if resolution < 2 {
        return Err(Error::InvalidParameter(format!(
            "resolution must be at least 2, got {resolution}"
        )));
    }
    if !(alpha.1 > alpha.0) || !(beta.1 > beta.0) {
        return Err(Error::InvalidParameter("empty parameter range".into()));
    }
    let at = |(lo, hi): (f64, f64), k: usize| {
        let s = k as f64 / resolution as f64;
        lo * (1.0 - s) + hi * s
    };
    let mut out = Vec::with_capacity((resolution + 1).pow(2));
    for i in 0..=resolution {
        let a = at(alpha, i);
        for j in 0..=resolution {
            let b = at(beta, j);
            out.push(FeasibilityPoint {
                alpha: a,
                beta: b,
                feasible: feasible_case1(a, b),
                b2_eq_b3: on_b2_eq_b3_circle(a, b),
            });
        }
    }
    Ok(out)
}

pub fn write_feasibility_csv<W: Write>(points: &[FeasibilityPoint], mut out: W) -> io::Result<()> {
    writeln!(out, "alpha,beta,feasible,b2_eq_b3")?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{}",
            fmt_real(p.alpha),
            fmt_real(p.beta),
            u8::from(p.feasible),
            u8::from(p.b2_eq_b3)
        )?;
    }
    Ok(())
}
