use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::TypedValueParser;
use clap::{Args, Parser, Subcommand};
use hardisk::contraction::{DEFAULT_CELLS, DEFAULT_QUADRATURE_ORDER, DEFAULT_TOL};
use hardisk::IntegralVariant;
use serde::Serialize;

mod commands;
mod manifest;

/// Critical-density bounds for the hard disk model via optimized path-coupling metrics.
#[derive(Debug, Parser)]
#[command(name = "hardisk", version)]
struct Cli {
    /// Worker threads for constraint assembly and coupling trials (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Largest density at which the optimized metric contracts.
    Bound(BoundArgs),
    /// `L,rho_star` rows for several grid sizes.
    Table(TableArgs),
    /// Writes the metric at a fixed density with its slack and axiom reports.
    Metric(MetricArgs),
    /// Runs the single-disk chain and reports acceptance statistics.
    Simulate(SimulateArgs),
    /// Monte Carlo estimate of the one-step metric change of the coupled chains.
    Couple(CoupleArgs),
    /// Re-runs the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
struct SolverArgs {
    /// Bisection tolerance on the density.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Upper limit of the savings integral.
    #[arg(long, default_value_t = IntegralVariant::Clamped)]
    variant: IntegralVariant,
    /// Gauss–Legendre points per integration piece.
    #[arg(long, default_value_t = DEFAULT_QUADRATURE_ORDER, value_parser = clap::value_parser!(u32).range(2..=256).map(|v| v as usize))]
    order: usize,
    /// Contraction slack `n·ε`.
    #[arg(long, default_value_t = hardisk::DEFAULT_EPSILON_HAT)]
    epsilon_hat: f64,
}

#[derive(Debug, Args, Serialize)]
struct BoundArgs {
    /// Number of cells on [0, 4].
    #[arg(long = "L", default_value_t = DEFAULT_CELLS, value_parser = cells_parser())]
    cells: usize,
    #[command(flatten)]
    solver: SolverArgs,
    /// Use the Hamming metric d ≡ 1 instead of optimizing.
    #[arg(long)]
    hamming: bool,
    /// Also write the JSON result here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct TableArgs {
    /// Comma-separated grid sizes.
    #[arg(long = "Ls", value_delimiter = ',', required = true, value_parser = cells_parser())]
    cells: Vec<usize>,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct MetricArgs {
    #[arg(long = "L", default_value_t = DEFAULT_CELLS, value_parser = cells_parser())]
    cells: usize,
    #[arg(long)]
    rho: f64,
    #[command(flatten)]
    solver: SolverArgs,
    /// Metric CSV; the report and axiom files are written beside it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct SimulateArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..).map(|v| v as usize))]
    n: usize,
    #[arg(long)]
    rho: f64,
    #[arg(long)]
    steps: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of evenly spaced validity audits.
    #[arg(long, default_value_t = 10)]
    checkpoints: u64,
    /// Writes the final configuration to `<snapshot>.csv` and `<snapshot>.json`.
    #[arg(long)]
    snapshot: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct CoupleArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..).map(|v| v as usize))]
    n: usize,
    #[arg(long)]
    rho: f64,
    /// Initial separation of the disagreeing disks, in units of r.
    #[arg(long)]
    ell: f64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Metric CSV as written by `metric`.
    #[arg(long, required_unless_present = "hamming", conflicts_with = "hamming")]
    metric: Option<PathBuf>,
    /// Use d ≡ 1 on 16 cells instead of a metric file.
    #[arg(long)]
    hamming: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Burn-in sweeps before each trial.
    #[arg(long, default_value_t = hardisk::coupling::DEFAULT_BURN_IN_SWEEPS)]
    burn_in: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReplayArgs {
    manifest: PathBuf,
}

fn cells_parser() -> impl TypedValueParser<Value = usize> {
    clap::value_parser!(u64).range(1..=4096).map(|v| v as usize)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let args: Vec<String> = std::env::args().skip(1).collect();
    match commands::dispatch(cli.command, &args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
