//! Explicit three-stage, third-order Runge-Kutta tableaus with non-negative
//! coefficients, and the constants the third-order MPRK schemes derive from
//! them.

use crate::error::{Error, Result};

/// Distance to an excluded parameter value below which construction is refused.
const EXCLUSION_TOL: f64 = 1e-12;

/// Order-condition residual accepted by [`Tableau3::is_mprk43_admissible`].
pub const ADMISSIBLE_RESIDUAL: f64 = 1e-12;

/// Coefficients of an explicit three-stage Runge-Kutta method.
///
/// The nodes are not stored: `c2 = a21` and `c3 = a31 + a32`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tableau3 {
    pub a21: f64,
    pub a31: f64,
    pub a32: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
}

/// Constants of the third-order MPRK scheme built on a tableau.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    /// Exponent of the stage-3 Patankar-weight denominator.
    pub p: f64,
    /// Exponent of the embedded second-order scheme's denominator.
    pub q: f64,
    pub beta1: f64,
    pub beta2: f64,
}

/// Residuals of the six third-order conditions. The first two (node
/// definitions) hold by construction and are always zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderResiduals(pub [f64; 6]);

impl OrderResiduals {
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

impl Tableau3 {
    /// Two-parameter family with `c2 = alpha`, `c3 = beta`.
    pub fn from_case1(alpha: f64, beta: f64) -> Result<Self> {
        let excluded = |what: &str| {
            Err(Error::InvalidParameter(format!(
                "case I tableau undefined for alpha = {alpha}, beta = {beta}: {what}"
            )))
        };
        if !alpha.is_finite() || !beta.is_finite() {
            return excluded("non-finite parameter");
        }
        if alpha.abs() < EXCLUSION_TOL {
            return excluded("alpha = 0");
        }
        if beta.abs() < EXCLUSION_TOL {
            return excluded("beta = 0");
        }
        if (alpha - beta).abs() < EXCLUSION_TOL {
            return excluded("alpha = beta");
        }
        if (2.0 - 3.0 * alpha).abs() < EXCLUSION_TOL {
            return excluded("alpha = 2/3");
        }
        let (a, b) = (alpha, beta);
        let denom = a * (2.0 - 3.0 * a);
        Ok(Self {
            a21: a,
            a31: (3.0 * a * b * (1.0 - a) - b * b) / denom,
            a32: b * (b - a) / denom,
            b1: 1.0 + (2.0 - 3.0 * (a + b)) / (6.0 * a * b),
            b2: (3.0 * b - 2.0) / (6.0 * a * (b - a)),
            b3: (2.0 - 3.0 * a) / (6.0 * b * (b - a)),
        })
    }

    /// One-parameter family with `c2 = c3 = 2/3` and `b3 = gamma`.
    pub fn from_case2(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma.abs() < EXCLUSION_TOL {
            return Err(Error::InvalidParameter(format!(
                "case II tableau undefined for gamma = {gamma}"
            )));
        }
        let w = 1.0 / (4.0 * gamma);
        Ok(Self {
            a21: 2.0 / 3.0,
            a31: 2.0 / 3.0 - w,
            a32: w,
            b1: 0.25,
            b2: 0.75 - gamma,
            b3: gamma,
        })
    }

    #[inline]
    pub fn c2(&self) -> f64 {
        self.a21
    }

    #[inline]
    pub fn c3(&self) -> f64 {
        self.a31 + self.a32
    }

    pub fn coefficients(&self) -> [f64; 6] {
        [self.a21, self.a31, self.a32, self.b1, self.b2, self.b3]
    }

    pub fn order_residuals(&self) -> OrderResiduals {
        let (c2, c3) = (self.c2(), self.c3());
        OrderResiduals([
            0.0,
            0.0,
            self.b1 + self.b2 + self.b3 - 1.0,
            self.b2 * c2 + self.b3 * c3 - 0.5,
            self.b2 * c2 * c2 + self.b3 * c3 * c3 - 1.0 / 3.0,
            self.a21 * self.a32 * self.b3 - 1.0 / 6.0,
        ])
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coefficients().iter().all(|&c| c >= 0.0)
    }

    /// Non-negative, third order, and `a21 >= 1/2` so that the embedded
    /// second-order denominator scheme has non-negative weights.
    pub fn is_mprk43_admissible(&self) -> bool {
        self.is_nonnegative()
            && self.order_residuals().max_abs() < ADMISSIBLE_RESIDUAL
            && self.a21 >= 0.5
    }

    pub fn derived(&self) -> DerivedParams {
        let beta2 = 1.0 / (2.0 * self.a21);
        DerivedParams {
            p: 3.0 * self.a21 * self.c3() * self.b3,
            q: self.a21,
            beta1: 1.0 - beta2,
            beta2,
        }
    }

    /// Residuals of the limit system whose unique positive solution is `x = y = 1`.
    pub fn limit_system_residuals(&self, x: f64, y: f64) -> [f64; 3] {
        let (c2, c3) = (self.c2(), self.c3());
        [
            self.b2 * c2 * x + self.b3 * c3 * y - 0.5,
            self.b2 * c2 * c2 * x * x + self.b3 * c3 * c3 * y * y - 1.0 / 3.0,
            x * y - 1.0,
        ]
    }
}

/// Free-function form of [`Tableau3::order_residuals`].
pub fn satisfies_order3(t: &Tableau3) -> OrderResiduals {
    t.order_residuals()
}

/// Free-function form of [`Tableau3::limit_system_residuals`].
pub fn check_limsys(t: &Tableau3, x: f64, y: f64) -> [f64; 3] {
    t.limit_system_residuals(x, y)
}

pub fn mprk43_admissible(t: &Tableau3) -> bool {
    t.is_mprk43_admissible()
}

/// Boundary between the middle and right branches of the case I feasible
/// region: the root of `3a(1-a) = (3a-2)/(6a-3)` in `(2/3, 1)`.
pub fn alpha0() -> f64 {
    let s = 2.0 * std::f64::consts::SQRT_2;
    (3.0 + (3.0 - s).cbrt() + (3.0 + s).cbrt()) / 6.0
}

/// Whether the case I tableau at `(alpha, beta)` has only non-negative
/// coefficients. Region boundaries count as feasible.
pub fn feasible_case1(alpha: f64, beta: f64) -> bool {
    let two_thirds = 2.0 / 3.0;
    let parabola = 3.0 * alpha * (1.0 - alpha);
    let a0 = alpha0();
    if (1.0 / 3.0..two_thirds).contains(&alpha) {
        two_thirds <= beta && beta <= parabola
    } else if alpha > two_thirds && alpha < a0 {
        parabola <= beta && beta <= two_thirds
    } else if alpha > a0 {
        (3.0 * alpha - 2.0) / (6.0 * alpha - 3.0) <= beta && beta <= two_thirds
    } else {
        false
    }
}

/// Admissible range of the case II parameter.
pub const CASE2_GAMMA_RANGE: (f64, f64) = (3.0 / 8.0, 3.0 / 4.0);
