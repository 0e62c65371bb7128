use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use entanglement_core::numerics::QuadratureSpec;
use rayon::prelude::*;

mod config;
mod error;
mod figures;
mod output;
mod scenario;

use config::{Overrides, RunConfig, Scenario};
use error::CliError;
use figures::Figure;
use output::Table;
use scenario::{build, evaluate, Row};

#[derive(Parser)]
#[command(name = "entangle", version, about = "Ground-state entanglement of two detectors coupled to a scalar field")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Free massive field
    Free(RunArgs),
    /// Massless field between Dirichlet plates
    Dirichlet(RunArgs),
    /// Free field with a first-order Gaussian potential
    Potential(RunArgs),
    /// Thermal field
    Thermal(RunArgs),
    /// Exact diagonalization of a truncated qubit-mode model
    Verify(RunArgs),
    /// Curve tables for the figures
    Figures(FigureArgs),
}

#[derive(Args)]
struct Common {
    /// Worker threads for sweep points
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Relative quadrature tolerance
    #[arg(long)]
    tol_rel: Option<f64>,
    /// Absolute quadrature tolerance
    #[arg(long)]
    tol_abs: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a value, e.g. `d=0.5`, `sweep.count=20` or `numerics.tol_rel=1e-8`
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output file; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct FigureArgs {
    #[arg(value_enum)]
    figure: Figure,
    /// Output directory
    #[arg(long, default_value = "figures")]
    out: PathBuf,
    #[command(flatten)]
    common: Common,
}

pub fn quadrature_spec(config: &RunConfig) -> QuadratureSpec {
    QuadratureSpec { rel_tol: config.numerics.tol_rel, abs_tol: config.numerics.tol_abs, ..Default::default() }
}

/// Validates every grid point, then evaluates them in grid order.
pub fn evaluate_all(config: &RunConfig) -> Result<Vec<Row>, CliError> {
    let spec = quadrature_spec(config);
    let jobs = config
        .points()
        .into_iter()
        .map(|(x, p)| build(config.scenario, &p).map(|job| (x, job)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(jobs.par_iter().map(|(x, job)| evaluate(*x, job, &spec)).collect())
}

fn run_scenario(scenario: Scenario, args: RunArgs) -> Result<(), CliError> {
    let overrides = Overrides { set: args.set, tol_rel: args.common.tol_rel, tol_abs: args.common.tol_abs };
    let config = RunConfig::load(scenario, args.config.as_deref(), &overrides)?;
    let rows = evaluate_all(&config)?;
    let table = Table {
        sweep: config.sweep.as_ref().map(|s| s.param.as_str()),
        header: vec![config.to_toml()],
        rows: &rows,
    };
    match args.out {
        Some(path) => fs::write(path, table.to_bytes())?,
        None => io::stdout().lock().write_all(&table.to_bytes())?,
    }
    Ok(())
}

fn run_figures(args: FigureArgs) -> Result<(), CliError> {
    let overrides = Overrides { set: Vec::new(), tol_rel: args.common.tol_rel, tol_abs: args.common.tol_abs };
    for name in figures::emit(args.figure, &args.out, &overrides)? {
        eprintln!("wrote {}", args.out.join(name).display());
    }
    Ok(())
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, CliError> {
    if jobs == 0 {
        return Err(CliError::Config("--jobs must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| CliError::Config(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (jobs, task): (usize, Box<dyn FnOnce() -> Result<(), CliError> + Send>) = match cli.command {
        Command::Figures(a) => (a.common.jobs, Box::new(move || run_figures(a))),
        Command::Free(a) => (a.common.jobs, Box::new(move || run_scenario(Scenario::Free, a))),
        Command::Dirichlet(a) => (a.common.jobs, Box::new(move || run_scenario(Scenario::Dirichlet, a))),
        Command::Potential(a) => (a.common.jobs, Box::new(move || run_scenario(Scenario::Potential, a))),
        Command::Thermal(a) => (a.common.jobs, Box::new(move || run_scenario(Scenario::Thermal, a))),
        Command::Verify(a) => (a.common.jobs, Box::new(move || run_scenario(Scenario::Verify, a))),
    };
    match pool(jobs).and_then(|p| p.install(task)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
