//! `ewl`: command-line front end for the single-leg pricing simulator.
//!
//! Subcommands run the experiments and write CSV results plus a manifest;
//! `render` re-draws SVG charts from those CSVs. Exit codes: 0 success,
//! 1 runtime error, 2 usage error.

mod charts;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{load_file, Command as RunCommand, FileConfig, RunConfig};
use error::{runtime, Result};

#[derive(Parser)]
#[command(
    name = "ewl",
    version,
    about = "Single-leg airline pricing: simulate, learn demand, optimize fares",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one episode and write its step trace.
    Episode(RunArgs),
    /// Sweep the exploration weight; each episode draws a random true frat5.
    SweepEta(RunArgs),
    /// Compare greedy and unified policies on a grid of true frat5 values.
    SweepFrat5(RunArgs),
    /// Offered-fare and estimate histograms at selected true frat5 values.
    Detailed(RunArgs),
    /// Draw SVG charts from the CSVs of a previous run.
    Render(RenderArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat TOML config file; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSVs and the manifest.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed; reruns with the same seed are byte-identical.
    #[arg(long)]
    seed: Option<u64>,
    /// Exploration weight (the fixed weight for grid and detailed runs).
    #[arg(long)]
    eta: Option<f64>,
    /// True frat5 of a single episode.
    #[arg(long)]
    frat5: Option<f64>,
    /// Episode policy: greedy, unified or random.
    #[arg(long)]
    policy: Option<String>,
    /// Experiment size preset: desk or paper (paper runs for hours).
    #[arg(long)]
    scale: Option<String>,
    /// Worker threads; 0 uses all cores.
    #[arg(long)]
    workers: Option<usize>,
}

impl RunArgs {
    fn overrides(&self) -> FileConfig {
        FileConfig {
            out: self.out.clone(),
            seed: self.seed,
            scale: self.scale.clone(),
            workers: self.workers,
            policy: self.policy.clone(),
            frat5: self.frat5,
            eta: self.eta,
            ..FileConfig::default()
        }
    }
}

#[derive(Args)]
struct RenderArgs {
    /// Config file naming the directory to render.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory holding the CSVs and manifest of a finished run.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn resolve(
    command: RunCommand,
    config_path: Option<&PathBuf>,
    overrides: FileConfig,
) -> Result<RunConfig> {
    let file = match config_path {
        Some(path) => load_file(path)?,
        None => FileConfig::default(),
    };
    RunConfig::from_parts(command, overrides.or(file))
}

fn execute_run(command: RunCommand, args: RunArgs) -> Result<()> {
    let config = resolve(command, args.config.as_ref(), args.overrides())?;
    if config.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build_global()
            .map_err(|e| runtime(format!("thread pool: {e}")))?;
    }
    output::execute(&config)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Cmd::Episode(args) => execute_run(RunCommand::Episode, args),
        Cmd::SweepEta(args) => execute_run(RunCommand::SweepEta, args),
        Cmd::SweepFrat5(args) => execute_run(RunCommand::SweepFrat5, args),
        Cmd::Detailed(args) => execute_run(RunCommand::Detailed, args),
        Cmd::Render(args) => {
            let overrides = FileConfig {
                out: args.out.clone(),
                ..FileConfig::default()
            };
            let config = resolve(RunCommand::Render, args.config.as_ref(), overrides)?;
            charts::render(&config)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
