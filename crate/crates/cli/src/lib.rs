//! Scenario runner for `lpscatter`: loads JSON scenarios, dispatches
//! commands to the core library and writes CSV tables.
//!
//! Exit status: 0 success, 1 invariant failure, 2 input error.

pub mod commands;
pub mod error;
pub mod output;
pub mod report;
pub mod scenario;

use clap::{Parser, ValueEnum};
use error::CliError;
use output::Sink;
use report::RunReport;
use scenario::{load_scenario, Scenario, BUNDLED};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Generalized eigenfunctions and the boundary condition
    Eigen,
    /// Spectral density (or atoms when w = 0)
    Density,
    /// Scattering matrix
    Smatrix,
    /// Unitary time evolution of the scenario packets
    Evolve,
    /// Scattering operator on the incoming packet
    Scatter,
    /// Compressed contraction semigroup on I0
    Semigroup,
    /// Reproducing kernels of H1(I0)
    Kernels,
    /// Degenerate one-point, one-interval and two-point models
    Degenerate,
    /// Every applicable invariant
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Eigen => "eigen",
            Command::Density => "density",
            Command::Smatrix => "smatrix",
            Command::Evolve => "evolve",
            Command::Scatter => "scatter",
            Command::Semigroup => "semigroup",
            Command::Kernels => "kernels",
            Command::Degenerate => "degenerate",
            Command::Verify => "verify",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        <Self as ValueEnum>::from_str(s, false).ok()
    }
}

#[derive(Debug, Clone, Parser)]
#[command(name = "lpscatter", version, about = "Scattering on the complement of two intervals")]
pub struct Cli {
    pub command: Command,
    /// Scenario file or bundled scenario name. `verify` without a scenario
    /// checks every bundled scenario.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Output directory for CSV files (default `out/<scenario>`; `verify`
    /// writes nothing unless given, and one subdirectory per scenario when
    /// run over all bundled scenarios).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Series truncation tolerance (overrides the scenario).
    #[arg(long)]
    pub eps: Option<f64>,
    /// Quadrature tolerance (overrides the scenario).
    #[arg(long)]
    pub tol: Option<f64>,
}

fn apply_overrides(mut sc: Scenario, cli: &Cli) -> Result<Scenario, CliError> {
    let mut errs = Vec::new();
    if let Some(eps) = cli.eps {
        if !(eps > 0.0 && eps < 1.0) {
            errs.push(format!("--eps: must lie in (0, 1), got {eps}"));
        }
        sc.eps = eps;
    }
    if let Some(tol) = cli.tol {
        if !(tol > 0.0 && tol < 1.0) {
            errs.push(format!("--tol: must lie in (0, 1), got {tol}"));
        }
        sc.quad_tol = tol;
    }
    if errs.is_empty() {
        Ok(sc)
    } else {
        Err(CliError::Validation(errs))
    }
}

/// Runs one command on one scenario source. CSVs go to `out`, or to
/// `out/<scenario>` when `per_scenario` is set.
pub fn run_command(cli: &Cli, source: &str, out: Option<PathBuf>, per_scenario: bool) -> Result<RunReport, CliError> {
    let sc = apply_overrides(load_scenario(source, Some(cli.command))?, cli)?;
    let dir = match out {
        Some(d) if per_scenario => Some(d.join(&sc.name)),
        Some(d) => Some(d),
        None => (cli.command != Command::Verify).then(|| PathBuf::from("out").join(&sc.name)),
    };
    let sink = Sink::new(dir);
    let report = commands::run(cli.command, &sc, &sink)?;
    if let Ok(json) = serde_json::to_string_pretty(&report) {
        sink.text(&format!("report_{}.json", cli.command.name()), json + "\n")?;
    }
    Ok(report)
}

/// Entry point shared by the binary and the tests; returns the exit status.
pub fn run(cli: &Cli) -> u8 {
    let sources: Vec<String> = match (&cli.scenario, cli.command) {
        (Some(s), _) => vec![s.clone()],
        (None, Command::Verify) => BUNDLED.iter().map(|(n, _)| n.to_string()).collect(),
        (None, _) => {
            eprintln!("error: --scenario is required for {}", cli.command.name());
            return 2;
        }
    };
    let mut status = 0;
    for src in &sources {
        match run_command(cli, src, cli.out.clone(), sources.len() > 1) {
            Ok(report) => {
                println!("{report}");
                if report.failed() {
                    status = status.max(1);
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                status = status.max(e.exit_code());
            }
        }
    }
    status
}
