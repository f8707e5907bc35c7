//! Command-line front end: `simulate`, `converge`, and `check` subcommands.
//! Data goes to files / standard output, diagnostics to standard error;
//! exit codes: 0 success, 1 input error, 2 numerical failure.

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::controllability::controllability_report;
use crate::error::{Error, Result};
use crate::flows::{self, SolveMethod};
use crate::io::{self, CsvScalar, LoadedSystem};
use crate::matcore;
use crate::models::{LinearControlSystem, PiecewiseControl};

#[derive(Parser)]
#[command(
    name = "liectrl",
    about = "Linear control systems on matrix Lie groups: solutions and \
             controllability diagnostics",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the system under its control program and write a trajectory CSV
    Simulate {
        /// Path to a system JSON document
        #[arg(long)]
        system: PathBuf,
        /// Solver: product:<n> | closed | rk4:<steps-per-unit-time>
        #[arg(long)]
        method: String,
        /// Samples per control segment (ignored by rk4, which records every step)
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
    },
    /// Study product-formula convergence against a reference solution
    Converge {
        /// Path to a system JSON document
        #[arg(long)]
        system: PathBuf,
        /// Largest n in the doubling sequence 1, 2, 4, ...
        #[arg(long = "n-max")]
        n_max: usize,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the controllability report
    Check {
        /// Path to a system JSON document
        #[arg(long)]
        system: PathBuf,
        /// Emit the report as JSON instead of text
        #[arg(long)]
        json: bool,
    },
}

fn parse_method(text: &str) -> Result<SolveMethod> {
    if text == "closed" {
        return Ok(SolveMethod::Closed);
    }
    if let Some(n) = text.strip_prefix("product:") {
        let n: usize = n
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad product step count in {text:?}")))?;
        return Ok(SolveMethod::Product { n });
    }
    if let Some(s) = text.strip_prefix("rk4:") {
        let steps: usize = s
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad rk4 step density in {text:?}")))?;
        return Ok(SolveMethod::Rk4 { steps_per_unit: steps });
    }
    Err(Error::InvalidInput(format!(
        "unknown method {text:?} (expected product:<n>, closed, or rk4:<steps>)"
    )))
}

fn read_system(path: &PathBuf) -> Result<LoadedSystem> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    io::load_system(&text)
}

fn write_file(path: &PathBuf, content: &str) -> Result<()> {
    fs::write(path, content)
        .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))
}

fn simulate_impl<T: CsvScalar>(
    system: &LinearControlSystem<T>,
    control: &PiecewiseControl,
    method: SolveMethod,
    samples: usize,
    out: &PathBuf,
) -> Result<String> {
    let traj = match method {
        SolveMethod::Rk4 { steps_per_unit } => {
            let e = crate::models::GroupElement::identity(system.model.clone());
            flows::rk4_oracle(system, control, &e, steps_per_unit)?
        }
        _ => flows::solve_piecewise(system, control, method, samples)?,
    };
    write_file(out, &io::trajectory_csv(&traj))?;
    let mut report = String::new();
    report.push_str(&format!("method: {}\n", traj.method_tag));
    report.push_str(&format!(
        "samples: {} over t in [0, {:.6}]\n",
        traj.len(),
        traj.times.last().unwrap()
    ));
    report.push_str(&format!("endpoint at t = {:.16e}:\n", traj.times.last().unwrap()));
    let end = &traj.endpoint().matrix;
    for i in 0..end.nrows() {
        let row: Vec<String> = (0..end.ncols())
            .flat_map(|j| {
                end[(i, j)]
                    .column_values()
                    .iter()
                    .map(|v| format!("{v:.16e}"))
                    .collect::<Vec<_>>()
            })
            .collect();
        report.push_str(&format!("  {}\n", row.join(" ")));
    }
    report.push_str(&format!(
        "max constraint residual: {:.3e}\n",
        traj.max_constraint_residual()
    ));
    if traj.len() >= 100 {
        let r = flows::ode_residual(system, &traj, control)?;
        report.push_str(&format!("ode residual (normalized): {r:.3e}\n"));
    } else {
        report.push_str("ode residual: skipped (fewer than 100 samples)\n");
    }
    Ok(report)
}

fn converge_impl<T: CsvScalar>(
    system: &LinearControlSystem<T>,
    control: &PiecewiseControl,
    n_max: usize,
    out: &PathBuf,
) -> Result<String> {
    if n_max < 1 {
        return Err(Error::InvalidInput("n-max must be >= 1".into()));
    }
    let total = control.total_duration();
    let inner = system.derivation.inner_generator.is_some();
    let (reference, ref_label) = if inner {
        let traj = flows::solve_piecewise(system, control, SolveMethod::Closed, 1)?;
        (traj.endpoint().matrix.clone(), "closed".to_string())
    } else {
        // ten times the density of the finest product grid
        let steps = ((10.0 * n_max as f64 / total).ceil() as usize).max(10);
        let e = crate::models::GroupElement::identity(system.model.clone());
        let traj = flows::rk4_oracle(system, control, &e, steps)?;
        (traj.endpoint().matrix.clone(), format!("rk4:{steps}"))
    };

    let mut csv = format!("# reference: {ref_label}\nn,error\n");
    let mut fit_points: Vec<(f64, f64)> = Vec::new();
    let mut n = 1usize;
    while n <= n_max {
        let traj = flows::solve_piecewise(system, control, SolveMethod::Product { n }, 1)?;
        let err = matcore::frobenius(&(&traj.endpoint().matrix - &reference));
        csv.push_str(&format!("{n},{err:.16e}\n"));
        if err > 1e-13 {
            fit_points.push(((n as f64).ln(), err.ln()));
        }
        n *= 2;
    }
    write_file(out, &csv)?;

    let mut report = format!("reference: {ref_label}\n");
    if fit_points.len() < 2 {
        report.push_str("fitted order: exact (all errors at rounding level)\n");
    } else {
        // least-squares slope of ln(error) against ln(n)
        let k = fit_points.len() as f64;
        let sx: f64 = fit_points.iter().map(|p| p.0).sum();
        let sy: f64 = fit_points.iter().map(|p| p.1).sum();
        let sxx: f64 = fit_points.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = fit_points.iter().map(|p| p.0 * p.1).sum();
        let slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
        report.push_str(&format!("fitted order: {:.3}\n", -slope));
    }
    Ok(report)
}

fn check_impl<T: CsvScalar>(
    system: &LinearControlSystem<T>,
    json: bool,
) -> Result<String> {
    let report = controllability_report(system)?;
    if json {
        return Ok(format!(
            "{}\n",
            serde_json::to_string_pretty(&report.to_json()).expect("report serializes")
        ));
    }
    let mut text = String::new();
    text.push_str(&format!("group: {}\n", system.model.name));
    text.push_str(&format!(
        "dim_a = {}, dim_h = {}, dim_g = {}\n",
        report.dim_a, report.dim_h, report.dim_g
    ));
    text.push_str(&format!("rank_condition: {}\n", report.rank_condition));
    text.push_str(&format!("a_is_D_invariant: {}\n", report.a_is_d_invariant));
    text.push_str(&format!(
        "spectral split of h (positive, zero, negative): ({}, {}, {})\n",
        report.split_dims.0, report.split_dims.1, report.split_dims.2
    ));
    text.push_str(&format!("verdict: {}\n", report.primary().kind.code()));
    for v in &report.verdicts {
        text.push_str(&format!("  [{}] {}\n", v.kind.code(), v.trail));
    }
    Ok(text)
}

/// Parses arguments from the process environment, runs the command, and
/// returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(stdout_text) => {
            print!("{stdout_text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Simulate { system, method, samples, out } => {
            let method = parse_method(&method)?;
            match read_system(&system)? {
                LoadedSystem::Real { system, control } => {
                    simulate_impl(&system, &control, method, samples, &out)
                }
                LoadedSystem::Complex { system, control } => {
                    simulate_impl(&system, &control, method, samples, &out)
                }
            }
        }
        Command::Converge { system, n_max, out } => match read_system(&system)? {
            LoadedSystem::Real { system, control } => {
                converge_impl(&system, &control, n_max, &out)
            }
            LoadedSystem::Complex { system, control } => {
                converge_impl(&system, &control, n_max, &out)
            }
        },
        Command::Check { system, json } => match read_system(&system)? {
            LoadedSystem::Real { system, .. } => check_impl(&system, json),
            LoadedSystem::Complex { system, .. } => check_impl(&system, json),
        },
    }
}
