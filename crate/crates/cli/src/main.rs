//! `freeconv`: free additive convolution, outlier prediction, and Monte
//! Carlo verification for additively deformed unitarily invariant models.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage/config error,
//! 3 numerical failure.

mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

use commands::{Context, MeasurePick, Which};
use config::{Overrides, RunConfig};
use freeconv::Error;

#[derive(Parser)]
#[command(name = "freeconv", version, about)]
struct Cli {
    /// Path to the JSON run configuration.
    #[arg(long, global = true, default_value = "freeconv.json")]
    config: String,

    /// Override simulation.n.
    #[arg(long, global = true)]
    n: Option<usize>,

    /// Override simulation.seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override simulation.trials.
    #[arg(long, global = true)]
    trials: Option<usize>,

    /// Override simulation.epsilon (prediction window half-width).
    #[arg(long, global = true)]
    epsilon: Option<f64>,

    /// Override simulation.eta (support enlargement for strays).
    #[arg(long, global = true)]
    eta: Option<f64>,

    /// Override the output directory.
    #[arg(long, global = true)]
    out: Option<String>,

    /// Cap the worker thread count (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a transform (G, F, h, R) of mu or nu at complex points.
    Transform {
        /// Which transform to evaluate.
        #[arg(long, value_enum)]
        which: Which,
        /// Which configured measure to use.
        #[arg(long, value_enum, default_value = "mu")]
        measure: MeasurePick,
        /// Points as `re[,im]` separated by `;`, e.g. "2;0,1;1.5,0.5".
        #[arg(long)]
        points: String,
    },
    /// Density and support of mu ⊞ nu.
    Convolve {
        /// Also write the subordination trace along the grid.
        #[arg(long)]
        trace: bool,
    },
    /// Solve the spike equation and write the admissible predictions.
    Outliers,
    /// Monte Carlo verification of the predictions.
    Simulate,
    /// Predictions plus simulation, combined into one pass/fail exit code.
    Verify {
        /// Minimum pass fraction counted as success.
        #[arg(long, default_value_t = 0.9)]
        threshold: f64,
    },
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Domain(_)
        | Error::Pole(_)
        | Error::Config(_)
        | Error::Measure(_)
        | Error::Family(_)
        | Error::Size(_) => 2,
        Error::Convergence(_) | Error::Boundary(_) | Error::Inversion(_) | Error::Singular(_) => 3,
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let overrides = Overrides {
        n: cli.n,
        seed: cli.seed,
        trials: cli.trials,
        epsilon: cli.epsilon,
        eta: cli.eta,
        out: cli.out,
    };
    if let Some(threads) = cli.threads {
        configure_threads(threads);
    }
    let config = RunConfig::load(&cli.config, &overrides)?;
    let ctx = Context::new(config)?;
    match cli.command {
        Command::Transform { which, measure, points } => {
            let points = commands::parse_points(&points)?;
            commands::cmd_transform(&ctx, which, measure, &points)?;
        }
        Command::Convolve { trace } => commands::cmd_convolve(&ctx, trace)?,
        Command::Outliers => commands::cmd_outliers(&ctx)?,
        Command::Simulate => {
            commands::cmd_simulate(&ctx)?;
        }
        Command::Verify { threshold } => {
            if !commands::cmd_verify(&ctx, threshold)? {
                eprintln!("verification failed: pass fraction below {threshold}");
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Worker count for the parallel trial loop (rayon reads this at pool
/// initialization, which happens on first use).
fn configure_threads(threads: usize) {
    std::env::set_var("RAYON_NUM_THREADS", threads.to_string());
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
