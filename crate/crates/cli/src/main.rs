use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod error;
mod svg;

use commands::{Format, SimArgs};

#[derive(Debug, Parser)]
#[command(
    name = "infonce-k",
    version,
    about = "Optimal negative sampling ratio for InfoNCE"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Settings file with `key = value` lines; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Directory for CSV/SVG output (default: current directory).
    #[arg(long)]
    output_dir: Option<PathBuf>,

    /// `csv` or `csv+svg`.
    #[arg(long)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Invert a K=1 AUC into the positive score mean.
    EstimateMu {
        #[arg(long, allow_negative_numbers = true)]
        auc: Option<f64>,
        /// Pull AUC values at or beyond 0.5 and 1 just inside the valid range.
        #[arg(long)]
        clamp: bool,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Effectiveness profile over K and its maximizer.
    OptimalK {
        #[arg(long, allow_negative_numbers = true)]
        mu_q: Option<f64>,
        /// Repeat to compute several profiles.
        #[arg(long, allow_negative_numbers = true)]
        lambda: Vec<f64>,
        /// `step,validation_auc` log to derive the training curve from.
        #[arg(long)]
        auc_log: Option<PathBuf>,
        /// Samples of the simulated training curve.
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        grid_max: Option<u32>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Optimal K across a range of score means.
    Sweep {
        #[arg(long, allow_negative_numbers = true)]
        mu_min: Option<f64>,
        #[arg(long)]
        mu_max: Option<f64>,
        #[arg(long)]
        mu_step: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        lambda: Vec<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        grid_max: Option<u32>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Emit an adaptive K schedule.
    Schedule {
        #[arg(long)]
        k_peak: Option<f64>,
        #[arg(long)]
        k_start: Option<f64>,
        #[arg(long)]
        total_steps: Option<usize>,
        /// Fraction of training at which K peaks.
        #[arg(long)]
        turning: Option<f64>,
        /// `linear` or `cosine`.
        #[arg(long)]
        shape: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Train the synthetic contrastive model.
    Simulate {
        /// `fixed:K` or `ans:K_PEAK[:TURNING[:SHAPE]]`.
        #[arg(long)]
        strategy: Option<String>,
        /// Comma-separated seeds; overrides `--seed`.
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Compare adaptive schedules with different turning points.
    TurningSweep {
        /// Comma-separated turning fractions.
        #[arg(long, value_delimiter = ',')]
        turning: Vec<f64>,
        /// Peak K; defaults to the optimum predicted for `mu_q`.
        #[arg(long)]
        k_peak: Option<f64>,
        #[arg(long)]
        shape: Option<String>,
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn run(cli: Cli) -> error::CliResult<()> {
    use commands::*;
    match cli.command {
        Command::EstimateMu { auc, clamp, config } => estimate::run(auc, clamp, config.as_deref()),
        Command::OptimalK {
            mu_q,
            lambda,
            auc_log,
            steps,
            grid_max,
            out,
        } => optimal::run_optimal_k(
            optimal::OptimalKFlags {
                mu_q,
                lambda,
                auc_log,
                steps,
                grid_max,
            },
            out.into(),
        ),
        Command::Sweep {
            mu_min,
            mu_max,
            mu_step,
            lambda,
            steps,
            grid_max,
            out,
        } => optimal::run_sweep(
            optimal::SweepFlags {
                mu_min,
                mu_max,
                mu_step,
                lambda,
                steps,
                grid_max,
            },
            out.into(),
        ),
        Command::Schedule {
            k_peak,
            k_start,
            total_steps,
            turning,
            shape,
            out,
        } => schedule::run(
            schedule::ScheduleFlags {
                k_peak,
                k_start,
                total_steps,
                turning,
                shape,
            },
            out.into(),
        ),
        Command::Simulate {
            strategy,
            seeds,
            seed,
            sim,
            out,
        } => simulate::run_simulate(strategy, seeds, seed, sim, out.into()),
        Command::TurningSweep {
            turning,
            k_peak,
            shape,
            seeds,
            sim,
            out,
        } => simulate::run_turning_sweep(turning, k_peak, shape, seeds, sim, out.into()),
    }
}

impl From<OutputArgs> for commands::OutputFlags {
    fn from(a: OutputArgs) -> Self {
        commands::OutputFlags {
            config: a.config,
            output_dir: a.output_dir,
            format: a.format,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
