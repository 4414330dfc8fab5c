//! Production-destruction systems.
//!
//! A system is described by its production matrix alone: entry `(i, j)` is
//! the rate `p_ij(y)` at which constituent `i` is produced from constituent
//! `j`. The destruction rate `d_ij` is the transposed entry `p_ji`, so every
//! system built here is fully conservative: whatever one constituent loses,
//! another gains.

use std::fmt;

use crate::error::{Error, Result};

/// Double-precision machine epsilon, used for the "empty" initial values of
/// the Brusselator and Robertson problems.
pub const EPS: f64 = f64::EPSILON;

/// Dense `n x n` matrix of non-negative production rates with zero diagonal.
#[derive(Clone, PartialEq)]
pub struct ProductionMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl ProductionMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![0.0; n * n],
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Production of constituent `i` from constituent `j`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.entries[i * self.n + j] = value;
    }

    /// Destruction of constituent `i` in favour of constituent `j`, i.e. `p_ji`.
    #[inline]
    pub fn destruction(&self, i: usize, j: usize) -> f64 {
        self.get(j, i)
    }

    /// Row-major view of the entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn clear(&mut self) {
        self.entries.iter_mut().for_each(|e| *e = 0.0);
    }

    /// Total production `P_i` of every constituent (row sums).
    pub fn production_totals(&self) -> Vec<f64> {
        self.entries
            .chunks(self.n)
            .map(|row| row.iter().sum())
            .collect()
    }

    /// Total destruction `D_i` of every constituent (column sums).
    pub fn destruction_totals(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for row in self.entries.chunks(self.n) {
            for (dj, &p) in d.iter_mut().zip(row) {
                *dj += p;
            }
        }
        d
    }

    /// `self += weight * other`
    pub fn add_scaled(&mut self, weight: f64, other: &ProductionMatrix) {
        assert_eq!(self.n, other.n, "production matrices of different size");
        for (a, &b) in self.entries.iter_mut().zip(&other.entries) {
            *a += weight * b;
        }
    }

    /// Weighted sum `sum_k weights[k] * mats[k]`.
    pub fn weighted_sum(weights: &[f64], mats: &[&ProductionMatrix]) -> ProductionMatrix {
        assert_eq!(weights.len(), mats.len());
        let n = mats.first().map_or(0, |m| m.n);
        let mut out = ProductionMatrix::zeros(n);
        for (&w, m) in weights.iter().zip(mats) {
            if w != 0.0 {
                out.add_scaled(w, m);
            }
        }
        out
    }

    fn validate(&self, system: &str) -> Result<()> {
        for i in 0..self.n {
            for j in 0..self.n {
                let value = self.get(i, j);
                if !value.is_finite() {
                    return Err(Error::NonFiniteRate {
                        system: system.to_string(),
                        i,
                        j,
                        value,
                    });
                }
                if i == j {
                    if value != 0.0 {
                        return Err(Error::NonZeroDiagonal {
                            system: system.to_string(),
                            i,
                            value,
                        });
                    }
                } else if value < 0.0 {
                    return Err(Error::NegativeRate {
                        system: system.to_string(),
                        i,
                        j,
                        value,
                    });
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ProductionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[f64]> = self.entries.chunks(self.n.max(1)).collect();
        f.debug_struct("ProductionMatrix")
            .field("n", &self.n)
            .field("rows", &rows)
            .finish()
    }
}

/// A fully conservative production-destruction system.
///
/// Implementors only supply production rates; [`eval_production`] checks the
/// result and [`eval_rhs`] derives the right-hand side `P_i - D_i`.
pub trait PDSystem: Send + Sync {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    /// Writes `p_ij(y)` into `p`. `p` arrives zeroed and sized `dim()`.
    fn fill_production(&self, y: &[f64], p: &mut ProductionMatrix);

    /// Closed-form solution at time `t` (measured from the initial time) for
    /// initial data `y0`, if one exists.
    fn exact(&self, _t: f64, _y0: &[f64]) -> Option<Vec<f64>> {
        None
    }

    fn has_exact(&self) -> bool {
        false
    }
}

/// Evaluates and checks the production matrix of `sys` at `y`.
pub fn eval_production(sys: &dyn PDSystem, y: &[f64]) -> Result<ProductionMatrix> {
    check_dim(sys, y)?;
    let mut p = ProductionMatrix::zeros(sys.dim());
    sys.fill_production(y, &mut p);
    p.validate(sys.name())?;
    Ok(p)
}

/// Right-hand side `y_i' = P_i(y) - D_i(y)`.
pub fn eval_rhs(sys: &dyn PDSystem, y: &[f64]) -> Result<Vec<f64>> {
    let p = eval_production(sys, y)?;
    Ok(rhs_from_production(&p))
}

/// Right-hand side without the sign checks, for explicit solvers whose
/// internal stages may leave the positive orthant. Rates must still be finite.
pub(crate) fn eval_rhs_unsigned(sys: &dyn PDSystem, y: &[f64]) -> Result<Vec<f64>> {
    check_dim(sys, y)?;
    let n = sys.dim();
    let mut p = ProductionMatrix::zeros(n);
    sys.fill_production(y, &mut p);
    for i in 0..n {
        for j in 0..n {
            let value = p.get(i, j);
            if !value.is_finite() {
                return Err(Error::NonFiniteRate {
                    system: sys.name().to_string(),
                    i,
                    j,
                    value,
                });
            }
        }
    }
    Ok(rhs_from_production(&p))
}

pub(crate) fn rhs_from_production(p: &ProductionMatrix) -> Vec<f64> {
    let n = p.n();
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            let pij = p.get(i, j);
            rhs[i] += pij;
            rhs[j] -= pij;
        }
    }
    rhs
}

pub fn exact_solution(sys: &dyn PDSystem, t: f64, y0: &[f64]) -> Result<Vec<f64>> {
    check_dim(sys, y0)?;
    sys.exact(t, y0)
        .ok_or_else(|| Error::NoExactSolution(sys.name().to_string()))
}

pub(crate) fn check_dim(sys: &dyn PDSystem, y: &[f64]) -> Result<()> {
    if y.len() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            found: y.len(),
        });
    }
    Ok(())
}

/// Returns an error naming the first component of `y` that is not strictly positive.
pub fn check_positive(y: &[f64]) -> Result<()> {
    match y.iter().position(|&v| !(v > 0.0)) {
        Some(index) => Err(Error::NonPositiveState {
            index,
            value: y[index],
        }),
        None => Ok(()),
    }
}

/// Two-constituent linear exchange `y1' = y2 - a y1`, `y2' = a y1 - y2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearExchange {
    pub a: f64,
}

impl PDSystem for LinearExchange {
    fn name(&self) -> &str {
        "linear"
    }

    fn dim(&self) -> usize {
        2
    }

    fn fill_production(&self, y: &[f64], p: &mut ProductionMatrix) {
        p.set(0, 1, y[1]);
        p.set(1, 0, self.a * y[0]);
    }

    fn exact(&self, t: f64, y0: &[f64]) -> Option<Vec<f64>> {
        let total = y0[0] + y0[1];
        let y1_inf = total / (self.a + 1.0);
        let c = y0[0] / y1_inf - 1.0;
        let y1 = (1.0 + c * (-(self.a + 1.0) * t).exp()) * y1_inf;
        Some(vec![y1, total - y1])
    }

    fn has_exact(&self) -> bool {
        true
    }
}

impl LinearExchange {
    /// Limit of `y1` as `t -> inf`.
    pub fn asymptote(&self, y0: &[f64]) -> f64 {
        (y0[0] + y0[1]) / (self.a + 1.0)
    }
}

/// Nutrient -> phytoplankton -> detritus model:
/// `p_21 = y1 y2 / (y1 + 1)`, `p_32 = a y2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearBloom {
    pub a: f64,
}

/// Default decay rate of the nonlinear problem. Not fixed by the literature
/// the problem comes from; exposed so it can be overridden.
pub const NONLINEAR_DEFAULT_A: f64 = 0.3;

impl PDSystem for NonlinearBloom {
    fn name(&self) -> &str {
        "nonlinear"
    }

    fn dim(&self) -> usize {
        3
    }

    fn fill_production(&self, y: &[f64], p: &mut ProductionMatrix) {
        p.set(1, 0, y[0] * y[1] / (y[0] + 1.0));
        p.set(2, 1, self.a * y[1]);
    }
}

/// The original six-species Brusselator with rate constants `k1..k4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Brusselator {
    pub k: [f64; 4],
}

impl PDSystem for Brusselator {
    fn name(&self) -> &str {
        "brusselator"
    }

    fn dim(&self) -> usize {
        6
    }

    fn fill_production(&self, y: &[f64], p: &mut ProductionMatrix) {
        let [k1, k2, k3, k4] = self.k;
        p.set(2, 1, k2 * y[1] * y[4]);
        p.set(3, 4, k4 * y[4]);
        p.set(4, 0, k1 * y[0]);
        p.set(4, 5, k3 * y[4] * y[4] * y[5]);
        p.set(5, 4, k2 * y[1] * y[4]);
    }
}

/// Robertson's stiff chemical kinetics problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Robertson {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

impl Default for Robertson {
    fn default() -> Self {
        Self {
            k1: 0.04,
            k2: 1e4,
            k3: 3e7,
        }
    }
}

impl PDSystem for Robertson {
    fn name(&self) -> &str {
        "robertson"
    }

    fn dim(&self) -> usize {
        3
    }

    fn fill_production(&self, y: &[f64], p: &mut ProductionMatrix) {
        p.set(0, 1, self.k2 * y[1] * y[2]);
        p.set(1, 0, self.k1 * y[0]);
        // quadratic in y2, as in the ODE form y3' = k3 y2^2
        p.set(2, 1, self.k3 * y[1] * y[1]);
    }
}

/// Parameters of the monomial pair family: `source` decays into `target` at
/// rate `mu * y_source^kappa`. Indices are zero-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonomialPairParams {
    pub source: usize,
    pub target: usize,
    pub mu: f64,
    pub kappa: u32,
}

impl MonomialPairParams {
    pub fn new(source: usize, target: usize, mu: f64, kappa: u32) -> Result<Self> {
        if source == target {
            return Err(Error::InvalidParameter(
                "monomial pair needs distinct source and target".into(),
            ));
        }
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mu must be positive, got {mu}"
            )));
        }
        if !(1..=2).contains(&kappa) {
            return Err(Error::InvalidParameter(format!(
                "kappa must be 1 or 2, got {kappa}"
            )));
        }
        Ok(Self {
            source,
            target,
            mu,
            kappa,
        })
    }
}

/// Single-reaction family used to probe order conditions; every other
/// constituent is inert.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonomialPair {
    params: MonomialPairParams,
    n: usize,
}

impl MonomialPair {
    pub fn new(params: MonomialPairParams, n: usize) -> Result<Self> {
        if params.source >= n || params.target >= n {
            return Err(Error::InvalidParameter(format!(
                "monomial pair indices ({}, {}) out of range for n = {n}",
                params.source + 1,
                params.target + 1
            )));
        }
        Ok(Self { params, n })
    }

    pub fn params(&self) -> MonomialPairParams {
        self.params
    }
}

impl PDSystem for MonomialPair {
    fn name(&self) -> &str {
        "monomial-pair"
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn fill_production(&self, y: &[f64], p: &mut ProductionMatrix) {
        let MonomialPairParams {
            source,
            target,
            mu,
            kappa,
        } = self.params;
        p.set(target, source, mu * y[source].powi(kappa as i32));
    }

    fn exact(&self, t: f64, y0: &[f64]) -> Option<Vec<f64>> {
        let MonomialPairParams {
            source,
            target,
            mu,
            kappa,
        } = self.params;
        let mut y = y0.to_vec();
        let s0 = y0[source];
        let s = match kappa {
            1 => s0 * (-mu * t).exp(),
            _ => s0 / (1.0 + mu * t * s0),
        };
        y[source] = s;
        y[target] = y0[target] + (s0 - s);
        Some(y)
    }

    fn has_exact(&self) -> bool {
        true
    }
}

/// A system defined by a closure, for user-supplied models.
pub struct FnSystem<F> {
    name: String,
    n: usize,
    f: F,
}

impl<F> FnSystem<F>
where
    F: Fn(&[f64], &mut ProductionMatrix) + Send + Sync,
{
    pub fn new(name: impl Into<String>, n: usize, f: F) -> Self {
        Self {
            name: name.into(),
            n,
            f,
        }
    }
}

impl<F> PDSystem for FnSystem<F>
where
    F: Fn(&[f64], &mut ProductionMatrix) + Send + Sync,
{
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn fill_production(&self, y: &[f64], p: &mut ProductionMatrix) {
        (self.f)(y, p)
    }
}

/// A built-in system together with its standard initial data and time interval.
pub struct Problem {
    pub id: String,
    pub system: Box<dyn PDSystem>,
    pub initial: Vec<f64>,
    pub t0: f64,
    pub t_end: f64,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("id", &self.id)
            .field("initial", &self.initial)
            .field("t0", &self.t0)
            .field("t_end", &self.t_end)
            .finish()
    }
}

impl Problem {
    pub fn linear(a: f64) -> Self {
        Self {
            id: "linear".into(),
            system: Box::new(LinearExchange { a }),
            initial: vec![0.9, 0.1],
            t0: 0.0,
            t_end: 1.75,
        }
    }

    pub fn nonlinear(a: f64) -> Self {
        Self {
            id: "nonlinear".into(),
            system: Box::new(NonlinearBloom { a }),
            initial: vec![9.98, 0.01, 0.01],
            t0: 0.0,
            t_end: 30.0,
        }
    }

    pub fn brusselator() -> Self {
        Self {
            id: "brusselator".into(),
            system: Box::new(Brusselator { k: [1.0; 4] }),
            initial: vec![10.0, 10.0, EPS, EPS, 0.1, 0.1],
            t0: 0.0,
            t_end: 6.0,
        }
    }

    pub fn robertson() -> Self {
        Self {
            id: "robertson".into(),
            system: Box::new(Robertson::default()),
            initial: vec![1.0 - 2.0 * EPS, EPS, EPS],
            t0: 1e-6,
            t_end: 1e10,
        }
    }

    /// Monomial pair with unit initial data on `[0, 1.75]`.
    pub fn monomial_pair(params: MonomialPairParams, n: usize) -> Result<Self> {
        Ok(Self {
            id: "monomial-pair".into(),
            system: Box::new(MonomialPair::new(params, n)?),
            initial: vec![1.0; n],
            t0: 0.0,
            t_end: 1.75,
        })
    }
}

/// Looks up a built-in problem.
///
/// Accepted identifiers: `linear[:a]`, `nonlinear[:a]`, `brusselator`,
/// `robertson`, and `monomial-pair[:I,J,mu,kappa[,n]]` with one-based
/// indices (defaults `1,2,1,1`, `n = max(I, J)`).
pub fn builtin(name: &str) -> Result<Problem> {
    let (head, args) = match name.split_once(':') {
        Some((h, a)) => (h.trim(), Some(a.trim())),
        None => (name.trim(), None),
    };
    let unknown = || Error::UnknownProblem(name.to_string());
    match head {
        "linear" => Ok(Problem::linear(
            args.map(parse_real).transpose()?.unwrap_or(5.0),
        )),
        "nonlinear" => Ok(Problem::nonlinear(
            args.map(parse_real)
                .transpose()?
                .unwrap_or(NONLINEAR_DEFAULT_A),
        )),
        "brusselator" if args.is_none() => Ok(Problem::brusselator()),
        "robertson" if args.is_none() => Ok(Problem::robertson()),
        "monomial-pair" | "monomial" => {
            let fields: Vec<&str> = match args {
                Some(a) => a.split(',').map(str::trim).collect(),
                None => vec!["1", "2", "1", "1"],
            };
            if fields.len() != 4 && fields.len() != 5 {
                return Err(unknown());
            }
            let index = |s: &str| -> Result<usize> {
                s.parse::<usize>()
                    .ok()
                    .filter(|&v| v >= 1)
                    .ok_or_else(|| Error::InvalidParameter(format!("bad index `{s}`")))
            };
            let i = index(fields[0])?;
            let j = index(fields[1])?;
            let mu = parse_real(fields[2])?;
            let kappa = fields[3]
                .parse::<u32>()
                .map_err(|_| Error::InvalidParameter(format!("bad kappa `{}`", fields[3])))?;
            let n = match fields.get(4) {
                Some(s) => index(s)?,
                None => i.max(j),
            };
            let params = MonomialPairParams::new(i - 1, j - 1, mu, kappa)?;
            Problem::monomial_pair(params, n)
        }
        _ => Err(unknown()),
    }
}

/// Parses a real written either as a float or as a fraction `num/den`.
pub fn parse_real(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::InvalidParameter(format!("cannot parse `{s}` as a number"));
    let value = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| bad())?;
            let den: f64 = den.trim().parse().map_err(|_| bad())?;
            num / den
        }
        None => s.parse().map_err(|_| bad())?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_production_at_paper_initial_state() {
        let sys = LinearExchange { a: 5.0 };
        let p = eval_production(&sys, &[0.9, 0.1]).unwrap();
        assert_eq!(p.get(0, 1), 0.1);
        assert_eq!(p.get(1, 0), 4.5);
        assert_eq!(p.get(0, 0), 0.0);
        assert_eq!(p.get(1, 1), 0.0);
        assert_eq!(p.destruction(0, 1), 4.5);
    }

    #[test]
    fn production_is_deterministic() {
        let prob = Problem::brusselator();
        let y = [1.3, 0.2, 0.7, 2.0, 0.4, 0.9];
        let a = eval_production(prob.system.as_ref(), &y).unwrap();
        let b = eval_production(prob.system.as_ref(), &y).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn robertson_rates_at_unit_state() {
        let p = eval_production(&Robertson::default(), &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(p.get(0, 1), 1e4);
        assert_eq!(p.get(1, 0), 0.04);
        assert_eq!(p.get(2, 1), 3e7);
        let nonzero = p.as_slice().iter().filter(|&&v| v != 0.0).count();
        assert_eq!(nonzero, 3);
    }

    #[test]
    fn rhs_examples() {
        let rhs = eval_rhs(&LinearExchange { a: 5.0 }, &[0.9, 0.1]).unwrap();
        assert!((rhs[0] + 4.4).abs() < 1e-15);
        assert!((rhs[1] - 4.4).abs() < 1e-15);

        let zero = FnSystem::new("inert", 3, |_y: &[f64], _p: &mut ProductionMatrix| {});
        assert_eq!(eval_rhs(&zero, &[1.0, 2.0, 3.0]).unwrap(), vec![0.0; 3]);

        let params = MonomialPairParams::new(0, 1, 1.0, 2).unwrap();
        let sys = MonomialPair::new(params, 3).unwrap();
        assert_eq!(
            eval_rhs(&sys, &[2.0, 1.0, 1.0]).unwrap(),
            vec![-4.0, 4.0, 0.0]
        );
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let err = eval_production(&LinearExchange { a: 5.0 }, &[1.0; 3]).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                found: 3
            }
        );
    }

    #[test]
    fn defective_systems_fail_fast() {
        let nan = FnSystem::new("nan", 2, |y: &[f64], p: &mut ProductionMatrix| {
            p.set(0, 1, y[0].ln() * f64::NAN)
        });
        assert!(matches!(
            eval_production(&nan, &[1.0, 1.0]),
            Err(Error::NonFiniteRate { i: 0, j: 1, .. })
        ));
        let neg = FnSystem::new("neg", 2, |_y: &[f64], p: &mut ProductionMatrix| {
            p.set(1, 0, -1.0)
        });
        assert!(matches!(
            eval_production(&neg, &[1.0, 1.0]),
            Err(Error::NegativeRate { .. })
        ));
        let diag = FnSystem::new("diag", 2, |_y: &[f64], p: &mut ProductionMatrix| {
            p.set(1, 1, 1.0)
        });
        assert!(matches!(
            eval_production(&diag, &[1.0, 1.0]),
            Err(Error::NonZeroDiagonal { i: 1, .. })
        ));
    }

    #[test]
    fn linear_exact_solution() {
        let sys = LinearExchange { a: 5.0 };
        let y0 = [0.9, 0.1];
        assert!((sys.asymptote(&y0) - 1.0 / 6.0).abs() < 1e-16);
        let far = exact_solution(&sys, 1e3, &y0).unwrap();
        assert!((far[0] - 1.0 / 6.0).abs() < 1e-15);
        let start = exact_solution(&sys, 0.0, &y0).unwrap();
        for (a, b) in start.iter().zip(&y0) {
            assert!((a - b).abs() <= 2.0 * f64::EPSILON * b.abs());
        }
    }

    #[test]
    fn monomial_pair_exact_solution() {
        let params = MonomialPairParams::new(0, 1, 2.0, 2).unwrap();
        let sys = MonomialPair::new(params, 3).unwrap();
        let y = exact_solution(&sys, 1.0, &[1.0; 3]).unwrap();
        assert!((y[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((y[1] - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(y[2], 1.0);
        assert_eq!(exact_solution(&sys, 0.0, &[1.0; 3]).unwrap(), vec![1.0; 3]);

        let params = MonomialPairParams::new(1, 0, 1.0, 1).unwrap();
        let sys = MonomialPair::new(params, 2).unwrap();
        let y = exact_solution(&sys, 0.5, &[1.0; 2]).unwrap();
        assert!((y[1] - (-0.5f64).exp()).abs() < 1e-16);
        assert!((y[0] - (2.0 - (-0.5f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn systems_without_closed_form_report_it() {
        let err = exact_solution(&Robertson::default(), 1.0, &[1.0, 0.0, 0.0]).unwrap_err();
        assert_eq!(err, Error::NoExactSolution("robertson".into()));
    }

    #[test]
    fn builtin_lookup() {
        let b = builtin("brusselator").unwrap();
        assert_eq!(b.system.dim(), 6);
        let y = [2.0, 3.0, 5.0, 7.0, 11.0, 13.0];
        let p = eval_production(b.system.as_ref(), &y).unwrap();
        assert_eq!(p.get(2, 1), 3.0 * 11.0);
        assert_eq!(p.get(3, 4), 11.0);
        assert_eq!(p.get(4, 0), 2.0);
        assert_eq!(p.get(4, 5), 11.0 * 11.0 * 13.0);
        assert_eq!(p.get(5, 4), 3.0 * 11.0);
        assert_eq!(p.as_slice().iter().filter(|&&v| v != 0.0).count(), 5);

        let lin = builtin("linear").unwrap();
        let p = eval_production(lin.system.as_ref(), &[2.0, 3.0]).unwrap();
        assert_eq!((p.get(0, 1), p.get(1, 0)), (3.0, 10.0));

        let rob = builtin("robertson").unwrap();
        let p = eval_production(rob.system.as_ref(), &[1.0, 2.0, 1.0]).unwrap();
        assert_eq!(p.get(2, 1), 3e7 * 4.0);
        assert_eq!(rob.initial, vec![1.0 - 2.0 * EPS, EPS, EPS]);
        assert_eq!(EPS, 2.220446049250313e-16);

        let nl = builtin("nonlinear:0.5").unwrap();
        let p = eval_production(nl.system.as_ref(), &[1.0, 2.0, 1.0]).unwrap();
        assert_eq!(p.get(2, 1), 1.0);

        let mp = builtin("monomial-pair:1,2,1,2,3").unwrap();
        assert_eq!(mp.system.dim(), 3);
        assert!(mp.system.has_exact());

        assert!(matches!(builtin("lorenz"), Err(Error::UnknownProblem(_))));
        assert!(builtin("monomial-pair:1,1,1,1").is_err());
        assert!(builtin("monomial-pair:1,2,1,3").is_err());
    }

    #[test]
    fn fractions_parse() {
        assert_eq!(parse_real("1/2").unwrap(), 0.5);
        assert_eq!(parse_real(" 0.75 ").unwrap(), 0.75);
        assert!(parse_real("x").is_err());
        assert!(parse_real("1/0").is_err());
    }
}
