//! `manifold-regress`: simulate sphere-valued regression data, fit the
//! estimators, run Monte-Carlo MISE and rate experiments, and plot results.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod fail;
mod io;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::fail::Failure;

#[derive(Debug, Parser)]
#[command(name = "manifold-regress", version, about = "Geodesic and Fréchet regression on the sphere")]
struct Cli {
    /// Worker threads for parallel work (default: all cores).
    #[arg(long, global = true, env = "MANIFOLD_REGRESS_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a dataset from a simulation config.
    Simulate(SimulateArgs),
    /// Fit an estimator to a dataset and write predictions on a 101-point grid.
    Fit(FitArgs),
    /// Monte-Carlo MISE table for settings × methods.
    Mise(ExperimentArgs),
    /// MISE along a ladder of sample sizes and the log-log slope.
    Rate(ExperimentArgs),
    /// SVG figure of data, truth and estimates in the (φ, θ) chart.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Dataset CSV to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Truth trace CSV (default: next to the dataset, `.truth.csv`).
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Overrides the seed of the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Dataset CSV (`x,y1,y2,y3`).
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub method: String,
    /// Bandwidth for locgeo / locfre.
    #[arg(long)]
    pub h: Option<f64>,
    /// Number of basis functions for trigeo / trifre.
    #[arg(long = "N")]
    pub n_terms: Option<usize>,
    /// Select h or N by leave-one-out cross-validation.
    #[arg(long)]
    pub loocv: bool,
    /// Speed bound Λ for lincos.
    #[arg(long)]
    pub lambda_max: Option<f64>,
    /// Speed bound for lingeo velocities.
    #[arg(long)]
    pub vmax: Option<f64>,
    /// Fit trigonometric methods on the mirrored data.
    #[arg(long)]
    pub reflect: bool,
    /// Optimizer seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Predictions CSV to write.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Results CSV; an aligned-text copy is written with a `.txt` extension.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub reps: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Predictions CSV; repeat for several estimates.
    #[arg(long)]
    pub pred: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Draw 12 great circles as a background grid.
    #[arg(long)]
    pub gridlines: bool,
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::usage(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Simulate(a) => commands::simulate(&a),
        Command::Fit(a) => commands::fit(&a),
        Command::Mise(a) => commands::mise(&a),
        Command::Rate(a) => commands::rate(&a),
        Command::Plot(a) => commands::plot(&a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
