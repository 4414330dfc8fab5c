use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use mprk::harness::write_feasibility_csv;
use mprk::pds::parse_real;
use mprk::trajectory::fmt_real;
use mprk::{
    builtin, convergence_study, feasibility_map, geometric_grid, integrate, theorem1_diagnostics,
    uniform_grid, ConvergenceSetup, SchemeSpec, Tableau3,
};

/// Modified Patankar-Runge-Kutta integrators for production-destruction systems.
#[derive(Debug, Parser)]
#[command(name = "mprk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate a built-in problem on a uniform grid and write the trajectory.
    Solve {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        scheme: SchemeSpec,
        #[arg(long, value_parser = real)]
        dt: f64,
        #[arg(long, value_parser = real)]
        t_end: f64,
        /// Start time; defaults to the problem's own.
        #[arg(long, value_parser = real)]
        t0: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Error and observed order over the step sizes dt0 / 2^k.
    Convergence {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        scheme: SchemeSpec,
        #[arg(long, value_parser = real)]
        dt0: f64,
        #[arg(long)]
        levels: usize,
        #[arg(long, value_parser = real)]
        t_end: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Robertson kinetics on a geometrically growing grid.
    Robertson {
        #[arg(long)]
        scheme: SchemeSpec,
        #[arg(long, value_parser = real, default_value = "1e-6")]
        dt0: f64,
        #[arg(long, value_parser = real, default_value = "4")]
        ratio: f64,
        #[arg(long, value_parser = real, default_value = "1e10")]
        t_end: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Coefficients, order residuals and admissibility of a third-order tableau.
    Tableau {
        #[command(subcommand)]
        family: TableauFamily,
    },
    /// Sample the non-negativity region of the two-parameter tableau family.
    Feasibility {
        #[arg(long, value_parser = real)]
        alpha_min: f64,
        #[arg(long, value_parser = real)]
        alpha_max: f64,
        #[arg(long, value_parser = real)]
        beta_min: f64,
        #[arg(long, value_parser = real)]
        beta_max: f64,
        /// Intervals per axis.
        #[arg(long)]
        resolution: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Single-step denominator diagnostics of a third-order scheme.
    Diagnose {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        scheme: SchemeSpec,
        #[arg(long, value_parser = real)]
        dt0: f64,
        #[arg(long)]
        levels: usize,
    },
}

#[derive(Debug, Subcommand)]
enum TableauFamily {
    Case1 {
        #[arg(long, value_parser = real)]
        alpha: f64,
        #[arg(long, value_parser = real)]
        beta: f64,
        /// Also write `name,value` CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Case2 {
        #[arg(long, value_parser = real)]
        gamma: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn real(s: &str) -> std::result::Result<f64, String> {
    parse_real(s).map_err(|e| e.to_string())
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve {
            problem,
            scheme,
            dt,
            t_end,
            t0,
            out,
        } => {
            let p = builtin(&problem)?;
            let grid = uniform_grid(t0.unwrap_or(p.t0), t_end, dt)?;
            let traj = integrate(p.system.as_ref(), &p.initial, &grid, &scheme)?;
            let mut w = sink(out.as_deref())?;
            traj.write_csv(&mut w)?;
            w.flush()?;
        }
        Command::Convergence {
            problem,
            scheme,
            dt0,
            levels,
            t_end,
            out,
        } => {
            let p = builtin(&problem)?;
            let setup = ConvergenceSetup {
                system: p.system.as_ref(),
                initial: &p.initial,
                t0: p.t0,
                t_end,
                dt0,
                levels,
            };
            let report = convergence_study(&setup, &scheme)?;
            let mut w = sink(out.as_deref())?;
            report.write_csv(&mut w)?;
            w.flush()?;
        }
        Command::Robertson {
            scheme,
            dt0,
            ratio,
            t_end,
            out,
        } => {
            let p = builtin("robertson")?;
            let grid = geometric_grid(p.t0, dt0, ratio, t_end)?;
            let traj = integrate(p.system.as_ref(), &p.initial, &grid, &scheme)?;
            let summary = format!(
                "steps,min_component,conservation_drift\n{},{},{}",
                traj.steps(),
                fmt_real(traj.min_component()),
                fmt_real(traj.conservation_drift())
            );
            let mut stdout = io::stdout().lock();
            match out {
                Some(path) => {
                    let mut w = sink(Some(&path))?;
                    traj.write_csv(&mut w)?;
                    w.flush()?;
                }
                None => {
                    traj.write_csv(&mut stdout)?;
                    writeln!(stdout)?;
                }
            }
            writeln!(stdout, "{summary}")?;
        }
        Command::Tableau { family } => {
            let (tableau, out) = match family {
                TableauFamily::Case1 { alpha, beta, out } => {
                    (Tableau3::from_case1(alpha, beta)?, out)
                }
                TableauFamily::Case2 { gamma, out } => (Tableau3::from_case2(gamma)?, out),
            };
            let rows = tableau_rows(&tableau);
            let mut stdout = io::stdout().lock();
            for (name, value) in &rows {
                writeln!(stdout, "{name:<12} {value}")?;
            }
            if let Some(path) = out {
                let mut w = sink(Some(&path))?;
                writeln!(w, "name,value")?;
                for (name, value) in &rows {
                    writeln!(w, "{name},{value}")?;
                }
                w.flush()?;
            }
        }
        Command::Feasibility {
            alpha_min,
            alpha_max,
            beta_min,
            beta_max,
            resolution,
            out,
        } => {
            let points = feasibility_map((alpha_min, alpha_max), (beta_min, beta_max), resolution)?;
            let mut w = sink(out.as_deref())?;
            write_feasibility_csv(&points, &mut w)?;
            w.flush()?;
        }
        Command::Diagnose {
            problem,
            scheme,
            dt0,
            levels,
        } => {
            if levels < 2 {
                bail!("diagnose needs at least 2 levels, got {levels}");
            }
            let p = builtin(&problem)?;
            let dts: Vec<f64> = (0..levels)
                .map(|k| dt0 / f64::powi(2.0, k as i32))
                .collect();
            let report = theorem1_diagnostics(p.system.as_ref(), &p.initial, &scheme, &dts)?;
            let mut stdout = io::stdout().lock();
            report.write_summary(&mut stdout)?;
        }
    }
    Ok(())
}

fn tableau_rows(t: &Tableau3) -> Vec<(String, String)> {
    let mut rows: Vec<(String, String)> = [
        ("a21", t.a21),
        ("a31", t.a31),
        ("a32", t.a32),
        ("b1", t.b1),
        ("b2", t.b2),
        ("b3", t.b3),
        ("c2", t.c2()),
        ("c3", t.c3()),
    ]
    .into_iter()
    .map(|(n, v)| (n.to_string(), fmt_real(v)))
    .collect();
    for (k, r) in t.order_residuals().0.iter().enumerate() {
        rows.push((format!("residual{}", k + 1), fmt_real(*r)));
    }
    let d = t.derived();
    rows.extend([
        ("p".to_string(), fmt_real(d.p)),
        ("q".to_string(), fmt_real(d.q)),
        ("beta1".to_string(), fmt_real(d.beta1)),
        ("beta2".to_string(), fmt_real(d.beta2)),
        ("nonnegative".to_string(), t.is_nonnegative().to_string()),
        (
            "admissible".to_string(),
            t.is_mprk43_admissible().to_string(),
        ),
    ]);
    rows
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            eprintln!("{}", msg.lines().next().unwrap_or("invalid arguments"));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}
