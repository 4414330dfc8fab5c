use std::io::{self, Write};

use crate::schemes::StepDiagnostics;

/// Time levels and states of an integration run, `states[k]` at `times[k]`.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// One entry per executed step when recording was requested.
    pub diagnostics: Option<Vec<StepDiagnostics>>,
}

impl Trajectory {
    pub fn new(t0: f64, y0: Vec<f64>) -> Self {
        Self {
            times: vec![t0],
            states: vec![y0],
            diagnostics: None,
        }
    }

    pub fn push(&mut self, t: f64, y: Vec<f64>) {
        self.times.push(t);
        self.states.push(y);
    }

    /// Number of executed steps (time levels minus one).
    pub fn steps(&self) -> usize {
        self.times.len().saturating_sub(1)
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().map_or(&[], Vec::as_slice)
    }

    pub fn min_component(&self) -> f64 {
        self.states
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest relative deviation of the component sum from its initial value.
    pub fn conservation_drift(&self) -> f64 {
        let Some(first) = self.states.first() else {
            return 0.0;
        };
        let s0: f64 = first.iter().sum();
        self.states
            .iter()
            .map(|y| (y.iter().sum::<f64>() - s0).abs() / s0.abs())
            .fold(0.0, f64::max)
    }

    /// Writes `t,y1,...,yN` CSV, one row per time level.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let header: Vec<String> = std::iter::once("t".to_string())
            .chain((1..=self.dim()).map(|i| format!("y{i}")))
            .collect();
        writeln!(out, "{}", header.join(","))?;
        for (t, y) in self.times.iter().zip(&self.states) {
            write!(out, "{}", fmt_real(*t))?;
            for v in y {
                write!(out, ",{}", fmt_real(*v))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_real(v: f64) -> String {
    format!("{v:?}")
}
