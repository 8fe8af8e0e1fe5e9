//! Runs the requested experiment and writes its result files: CSVs per the
//! harness schemas plus the run manifest.

use std::fs;
use std::io;
use std::time::Instant;

use ewl_core::harness::{run_detailed_view, run_eta_sweep, run_frat5_grid};
use ewl_core::simulator::run_episode;

use crate::config::{write_manifest, Command, RunConfig};
use crate::error::{runtime, Result};

pub const EPISODE_TRACE_CSV: &str = "episode_trace.csv";
pub const ETA_SWEEP_CSV: &str = "eta_sweep.csv";
pub const FRAT5_GRID_CSV: &str = "frat5_grid.csv";

/// File name of the detailed histogram CSV for one true frat5 point.
pub fn detailed_csv_name(frat5: f64) -> String {
    format!("detailed_{frat5:.2}.csv")
}

/// Executes a run command and writes CSVs and the manifest into `out`.
pub fn execute(config: &RunConfig) -> Result<()> {
    let started = Instant::now();
    fs::create_dir_all(&config.out)?;
    match config.command {
        Command::Episode => episode(config)?,
        Command::SweepEta => sweep_eta(config)?,
        Command::SweepFrat5 => sweep_frat5(config)?,
        Command::Detailed => detailed(config)?,
        Command::Render => return Err(runtime("render is handled by the chart module")),
    }
    write_manifest(config, started.elapsed().as_secs_f64())?;
    Ok(())
}

fn write_file<F>(config: &RunConfig, name: &str, body: F) -> Result<()>
where
    F: FnOnce(&mut Vec<u8>) -> io::Result<()>,
{
    let mut buf = Vec::new();
    body(&mut buf)?;
    let path = config.out.join(name);
    fs::write(&path, buf)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn episode(config: &RunConfig) -> Result<()> {
    let result = run_episode(&config.episode_config()?)?;
    write_file(config, EPISODE_TRACE_CSV, |w| result.write_trace_csv(w))?;
    let final_frat5 = result.frat5_hat_trajectory.last().copied().unwrap_or(f64::NAN);
    println!(
        "episode: {} policy, {} steps, total revenue ${:.2}, mean per sell date ${:.2}, final frat5 estimate {:.3}",
        config.policy,
        config.steps,
        result.total_revenue_dollars(),
        result.mean_step_revenue_dollars(),
        final_frat5,
    );
    Ok(())
}

fn sweep_eta(config: &RunConfig) -> Result<()> {
    let result = run_eta_sweep(&config.sweep_spec()?)?;
    write_file(config, ETA_SWEEP_CSV, |w| result.write_eta_csv(w))?;
    println!("eta sweep: {} values", result.rows.len());
    Ok(())
}

fn sweep_frat5(config: &RunConfig) -> Result<()> {
    let result = run_frat5_grid(&config.sweep_spec()?)?;
    write_file(config, FRAT5_GRID_CSV, |w| result.write_grid_csv(w))?;
    println!("frat5 grid: {} rows", result.rows.len());
    Ok(())
}

fn detailed(config: &RunConfig) -> Result<()> {
    let result = run_detailed_view(&config.sweep_spec()?)?;
    for point in result.detailed_points() {
        write_file(config, &detailed_csv_name(point), |w| {
            result.write_detailed_csv(point, w)
        })?;
    }
    Ok(())
}
