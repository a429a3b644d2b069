//! `swamp`: generate instances, run solvers, and reproduce experiments.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Exit status for malformed invocations.
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(name = "swamp", version, about = "Sparse recovery with swept approximate message passing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw a problem instance and write it as JSON.
    Generate(GenerateArgs),
    /// Run one solver on an instance file.
    Solve(SolveArgs),
    /// Run an experiment grid and write CSV results.
    Experiment(ExperimentArgs),
    /// Time AMP and SwAMP iterations over a range of sizes.
    Bench(BenchArgs),
}

/// Options shared by every subcommand.
#[derive(Debug, Args)]
pub struct Common {
    /// TOML configuration file.
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    /// `dotted.key=value` override applied after the file; repeatable.
    #[arg(short = 's', long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Directory for output files; created if missing.
    #[arg(short, long, default_value = ".")]
    pub out: PathBuf,
    /// Random seed; overrides the seed in the configuration.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Also write the measurement matrix as `matrix.csv`.
    #[arg(long)]
    pub matrix_csv: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Instance file written by `swamp generate`.
    pub instance: PathBuf,
    #[command(flatten)]
    pub common: Common,
    /// Solver to run; shorthand for `--set algorithm=NAME`.
    #[arg(short, long)]
    pub algorithm: Option<String>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub common: Common,
    /// Experiment family when no configuration file names one.
    #[arg(long)]
    pub family: Option<String>,
    /// Number of worker threads for independent trials.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated signal sizes, e.g. `250,500`.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<usize>,
    /// Iterations timed per size and algorithm.
    #[arg(long)]
    pub iterations: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let command_line = std::env::args().collect::<Vec<_>>().join(" ");
    let result = match cli.command {
        Command::Generate(args) => commands::generate(&args, &command_line),
        Command::Solve(args) => commands::solve(&args, &command_line),
        Command::Experiment(args) => commands::experiment(&args, &command_line),
        Command::Bench(args) => commands::bench(&args, &command_line),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<commands::UsageError>().is_some() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
