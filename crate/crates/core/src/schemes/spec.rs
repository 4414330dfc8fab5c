use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pds::parse_real;
use crate::tableau::{DerivedParams, Tableau3};

/// Whether stage production terms are Patankar-weighted.
///
/// `Conservative` (δ = 1) keeps every stage conservative at the cost of a
/// full solve; `NonConservative` (δ = 0, the "ncs" variants) leaves stage
/// production explicit so the stage solves are diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Delta {
    Conservative,
    NonConservative,
}

impl Delta {
    pub fn as_int(self) -> u8 {
        match self {
            Delta::Conservative => 1,
            Delta::NonConservative => 0,
        }
    }
}

/// How a third-order scheme's tableau was parameterised.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mprk43Params {
    CaseI { alpha: f64, beta: f64 },
    CaseII { gamma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// Modified Patankar-Euler.
    Mpe,
    Mprk22 {
        alpha: f64,
    },
    Mprk43 {
        params: Mprk43Params,
        tableau: Tableau3,
    },
}

/// A fully specified MPRK scheme.
///
/// Identifiers: `mpe`, `mprk22:<alpha>`, `mprk43i:<alpha>,<beta>`,
/// `mprk43ii:<gamma>`, each optionally followed by `:ncs`. Parameters may be
/// written as fractions (`mprk43i:1,1/2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeSpec {
    pub family: Family,
    pub delta: Delta,
}

impl SchemeSpec {
    pub fn mpe() -> Self {
        Self {
            family: Family::Mpe,
            delta: Delta::Conservative,
        }
    }

    pub fn mprk22(alpha: f64, delta: Delta) -> Result<Self> {
        if !(alpha >= 0.5) || !alpha.is_finite() {
            return Err(Error::InadmissibleScheme(format!(
                "MPRK22 requires alpha >= 1/2, got {alpha}"
            )));
        }
        Ok(Self {
            family: Family::Mprk22 { alpha },
            delta,
        })
    }

    pub fn mprk43_case1(alpha: f64, beta: f64, delta: Delta) -> Result<Self> {
        let tableau = Tableau3::from_case1(alpha, beta)?;
        Self::mprk43(Mprk43Params::CaseI { alpha, beta }, tableau, delta)
    }

    pub fn mprk43_case2(gamma: f64, delta: Delta) -> Result<Self> {
        let tableau = Tableau3::from_case2(gamma)?;
        Self::mprk43(Mprk43Params::CaseII { gamma }, tableau, delta)
    }

    fn mprk43(params: Mprk43Params, tableau: Tableau3, delta: Delta) -> Result<Self> {
        if !tableau.is_mprk43_admissible() {
            return Err(Error::InadmissibleScheme(format!(
                "{params:?} gives tableau {tableau:?}, which needs non-negative \
                 third-order coefficients and a21 >= 1/2"
            )));
        }
        Ok(Self {
            family: Family::Mprk43 { params, tableau },
            delta,
        })
    }

    /// The six third-order schemes used throughout the experiments:
    /// MPRK43I(1,1/2), MPRK43I(1/2,3/4), MPRK43II(1/2), each with δ = 1 and δ = 0.
    pub fn named_mprk43() -> Vec<SchemeSpec> {
        let mut out = Vec::with_capacity(6);
        for delta in [Delta::Conservative, Delta::NonConservative] {
            out.push(Self::mprk43_case1(1.0, 0.5, delta).unwrap());
            out.push(Self::mprk43_case1(0.5, 0.75, delta).unwrap());
            out.push(Self::mprk43_case2(0.5, delta).unwrap());
        }
        out
    }

    /// MPRK22(1), MPRK22(1/2) and MPRK22(2/3) with conservative stages.
    pub fn named_mprk22() -> Vec<SchemeSpec> {
        [1.0, 0.5, 2.0 / 3.0]
            .into_iter()
            .map(|a| Self::mprk22(a, Delta::Conservative).unwrap())
            .collect()
    }

    pub fn tableau(&self) -> Option<Tableau3> {
        match self.family {
            Family::Mprk43 { tableau, .. } => Some(tableau),
            _ => None,
        }
    }

    pub fn derived(&self) -> Option<DerivedParams> {
        self.tableau().map(|t| t.derived())
    }

    /// Nominal order of accuracy.
    pub fn order(&self) -> u32 {
        match self.family {
            Family::Mpe => 1,
            Family::Mprk22 { .. } => 2,
            Family::Mprk43 { .. } => 3,
        }
    }
}

impl fmt::Display for SchemeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Mpe => write!(f, "mpe")?,
            Family::Mprk22 { alpha } => write!(f, "mprk22:{alpha}")?,
            Family::Mprk43 {
                params: Mprk43Params::CaseI { alpha, beta },
                ..
            } => write!(f, "mprk43i:{alpha},{beta}")?,
            Family::Mprk43 {
                params: Mprk43Params::CaseII { gamma },
                ..
            } => write!(f, "mprk43ii:{gamma}")?,
        }
        if self.delta == Delta::NonConservative {
            write!(f, ":ncs")?;
        }
        Ok(())
    }
}

impl FromStr for SchemeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidScheme(s.to_string());
        let mut parts: Vec<&str> = s.trim().split(':').map(str::trim).collect();
        let delta = if parts.len() > 1 && parts.last() == Some(&"ncs") {
            parts.pop();
            Delta::NonConservative
        } else {
            Delta::Conservative
        };
        let args: Vec<f64> = match parts.get(1) {
            Some(a) => a
                .split(',')
                .map(parse_real)
                .collect::<Result<_>>()
                .map_err(|_| bad())?,
            None => Vec::new(),
        };
        if parts.len() > 2 {
            return Err(bad());
        }
        match (parts[0].to_ascii_lowercase().as_str(), args.as_slice()) {
            ("mpe", []) if delta == Delta::Conservative => Ok(Self::mpe()),
            ("mprk22", [alpha]) => Self::mprk22(*alpha, delta),
            ("mprk43i", [alpha, beta]) => Self::mprk43_case1(*alpha, *beta, delta),
            ("mprk43ii", [gamma]) => Self::mprk43_case2(*gamma, delta),
            _ => Err(bad()),
        }
    }
}
