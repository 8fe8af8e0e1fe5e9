//! Experiment harness: the η sweep, the frat5 grid and the detailed view,
//! with normalization, MSE and confidence intervals.
//!
//! All experiments share episode seeds derived from the master seed by
//! index, so parameter points and methods are compared under common random
//! numbers: differences between rows are policy-driven, not sampling noise.

use std::io::{self, Write};
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::fares::{phi_from_frat5, DemandParams};
use crate::rng::{derive_seed, keyed_rng};
use crate::simulator::{run_episode, EpisodeConfig, EpisodeResult, PolicyKind};
use crate::stats::{ci99_half_width, mean};

const STREAM_EPISODE: u64 = 0x4550_4953;
const STREAM_FRAT5: u64 = 0x4635_5452;
const STREAM_ETA: u64 = 0x4554_4153;

/// Upper end of the η sampling range.
pub const ETA_MAX: f64 = 8000.0;
/// η value highlighted throughout the experiments.
pub const ETA_REFERENCE: f64 = 2167.0;
/// Interval the true frat5 is drawn from in the η sweep.
pub const FRAT5_INTERVAL: (f64, f64) = (2.1, 3.8);
/// Width of the frat5-estimate histogram bins in the detailed view.
pub const FRAT5_BIN_WIDTH: f64 = 0.1;

/// Experiment size preset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// Minutes of compute: 16 η samples × 128 episodes, 18-point grid × 256.
    Desk,
    /// The full protocol: 160 η samples × 2560 episodes, 4000 per grid
    /// point. Hours of compute.
    Paper,
}

impl Scale {
    pub fn as_str(self) -> &'static str {
        match self {
            Scale::Desk => "desk",
            Scale::Paper => "paper",
        }
    }
}

impl FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Scale::Desk),
            "paper" => Ok(Scale::Paper),
            other => Err(Error::InvalidSweepSpec(format!(
                "unknown scale {other:?}, expected desk or paper"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    EtaSweep,
    Frat5Grid,
    Detailed,
}

/// Parameters of one experiment run.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub kind: SweepKind,
    /// Number of η values for the sweep (stratified over [0, ETA_MAX] with
    /// 0 and ETA_REFERENCE always included). Ignored when `eta_values` is
    /// non-empty.
    pub eta_samples: usize,
    /// Explicit η values; overrides sampling.
    pub eta_values: Vec<f64>,
    /// η used by the unified method in grid and detailed runs.
    pub eta_fixed: f64,
    /// True-frat5 interval for the η sweep.
    pub frat5_interval: (f64, f64),
    /// True-frat5 points for grid and detailed runs.
    pub frat5_points: Vec<f64>,
    pub episodes_per_point: usize,
    /// Template episode; frat5_true, eta, policy_kind and seed are
    /// overridden per episode.
    pub base: EpisodeConfig,
    pub master_seed: u64,
}

impl SweepSpec {
    pub fn eta_sweep(scale: Scale, master_seed: u64) -> Self {
        let (samples, episodes) = match scale {
            Scale::Desk => (16, 128),
            Scale::Paper => (160, 2560),
        };
        Self {
            kind: SweepKind::EtaSweep,
            eta_samples: samples,
            eta_values: Vec::new(),
            eta_fixed: ETA_REFERENCE,
            frat5_interval: FRAT5_INTERVAL,
            frat5_points: Vec::new(),
            episodes_per_point: episodes,
            base: EpisodeConfig::baseline(PolicyKind::Unified, 2.56, ETA_REFERENCE, 0),
            master_seed,
        }
    }

    pub fn frat5_grid(scale: Scale, master_seed: u64) -> Self {
        let episodes = match scale {
            Scale::Desk => 256,
            Scale::Paper => 4000,
        };
        let points = 18;
        let (lo, hi) = FRAT5_INTERVAL;
        let grid = (0..points)
            .map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64)
            .collect();
        Self {
            kind: SweepKind::Frat5Grid,
            eta_samples: 0,
            eta_values: Vec::new(),
            eta_fixed: ETA_REFERENCE,
            frat5_interval: FRAT5_INTERVAL,
            frat5_points: grid,
            episodes_per_point: episodes,
            base: EpisodeConfig::baseline(PolicyKind::Unified, 2.56, ETA_REFERENCE, 0),
            master_seed,
        }
    }

    pub fn detailed(scale: Scale, master_seed: u64) -> Self {
        let episodes = match scale {
            Scale::Desk => 256,
            Scale::Paper => 4000,
        };
        Self {
            kind: SweepKind::Detailed,
            eta_samples: 0,
            eta_values: Vec::new(),
            eta_fixed: ETA_REFERENCE,
            frat5_interval: FRAT5_INTERVAL,
            frat5_points: vec![2.1, 2.56, 3.7],
            episodes_per_point: episodes,
            base: EpisodeConfig::baseline(PolicyKind::Unified, 2.56, ETA_REFERENCE, 0),
            master_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.episodes_per_point < 1 {
            return Err(Error::InvalidSweepSpec("episodes_per_point must be >= 1".into()));
        }
        self.base.validate().map_err(|e| match e {
            Error::InvalidEpisodeConfig(msg) => {
                Error::InvalidSweepSpec(format!("base config: {msg}"))
            }
            other => other,
        })?;
        for &eta in &self.eta_values {
            if !(eta >= 0.0) || !eta.is_finite() {
                return Err(Error::InvalidSweepSpec(format!("eta value {eta} invalid")));
            }
        }
        match self.kind {
            SweepKind::EtaSweep => {
                let (lo, hi) = self.frat5_interval;
                if !(lo > 1.0 && hi > lo) {
                    return Err(Error::InvalidSweepSpec(format!(
                        "frat5 interval [{lo}, {hi}] must satisfy 1 < lo < hi"
                    )));
                }
                if self.eta_values.is_empty() && self.eta_samples < 2 {
                    return Err(Error::InvalidSweepSpec(
                        "eta_samples must be >= 2 when no explicit values are given".into(),
                    ));
                }
            }
            SweepKind::Frat5Grid | SweepKind::Detailed => {
                if self.frat5_points.is_empty() {
                    return Err(Error::InvalidSweepSpec("frat5_points must be non-empty".into()));
                }
                for &f5 in &self.frat5_points {
                    if !(f5 > 1.0) || !f5.is_finite() {
                        return Err(Error::InvalidSweepSpec(format!(
                            "frat5 point {f5} must be > 1"
                        )));
                    }
                }
                if !(self.eta_fixed >= 0.0) || !self.eta_fixed.is_finite() {
                    return Err(Error::InvalidSweepSpec(format!(
                        "eta_fixed must be >= 0, got {}",
                        self.eta_fixed
                    )));
                }
            }
        }
        Ok(())
    }

    /// η values for the sweep: explicit list, or stratified-uniform samples
    /// over [0, ETA_MAX] plus the mandatory 0 and ETA_REFERENCE.
    pub fn resolved_eta_values(&self) -> Vec<f64> {
        let mut values = if self.eta_values.is_empty() {
            let strata = self.eta_samples.saturating_sub(2).max(1);
            let mut v: Vec<f64> = (0..strata)
                .map(|k| {
                    let u: f64 = keyed_rng(self.master_seed, STREAM_ETA, k as u64, 0).random();
                    (k as f64 + u) * ETA_MAX / strata as f64
                })
                .collect();
            v.push(0.0);
            v.push(ETA_REFERENCE);
            v
        } else {
            self.eta_values.clone()
        };
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite eta values"));
        values.dedup();
        values
    }

    /// Episode seed shared across parameter points and methods (common
    /// random numbers).
    fn episode_seed(&self, episode: usize) -> u64 {
        derive_seed(self.master_seed, STREAM_EPISODE, episode as u64)
    }

    /// True frat5 for the η sweep's `episode`-th run, identical across η.
    fn episode_frat5(&self, episode: usize) -> f64 {
        let (lo, hi) = self.frat5_interval;
        let u: f64 = keyed_rng(self.master_seed, STREAM_FRAT5, episode as u64, 0).random();
        lo + (hi - lo) * u
    }
}

/// One aggregated table row. For the η sweep `parameter` is η and `method`
/// is None; for the grid `parameter` is the true frat5 and `method` tags
/// the policy. Per-episode values are kept for paired comparisons.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub parameter: f64,
    pub method: Option<PolicyKind>,
    pub norm_rev: f64,
    pub norm_rev_ci99: f64,
    pub mse: f64,
    pub mse_ci99: f64,
    pub per_episode_norm_rev: Vec<f64>,
    pub per_episode_mse: Vec<f64>,
}

/// One histogram entry of the detailed view. `key` is either `fare_<dollars>`
/// or `frat5_<bin lower edge>`.
#[derive(Debug, Clone, PartialEq)]
pub struct DetailedRow {
    pub frat5_true: f64,
    pub method: PolicyKind,
    pub key: String,
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub kind: SweepKind,
    pub rows: Vec<SweepRow>,
    pub detailed: Vec<DetailedRow>,
}

impl SweepResult {
    /// `eta,norm_rev,norm_rev_ci99,mse,mse_ci99`, one row per η.
    pub fn write_eta_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "eta,norm_rev,norm_rev_ci99,mse,mse_ci99")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{}",
                r.parameter, r.norm_rev, r.norm_rev_ci99, r.mse, r.mse_ci99
            )?;
        }
        Ok(())
    }

    /// `frat5,method,norm_rev,norm_rev_ci99,mse,mse_ci99`.
    pub fn write_grid_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "frat5,method,norm_rev,norm_rev_ci99,mse,mse_ci99")?;
        for r in &self.rows {
            let method = r.method.map_or("unified", PolicyKind::as_str);
            writeln!(
                w,
                "{},{},{},{},{},{}",
                r.parameter, method, r.norm_rev, r.norm_rev_ci99, r.mse, r.mse_ci99
            )?;
        }
        Ok(())
    }

    /// Distinct frat5 points of a detailed result, in run order.
    pub fn detailed_points(&self) -> Vec<f64> {
        let mut points = Vec::new();
        for r in &self.detailed {
            if !points.contains(&r.frat5_true) {
                points.push(r.frat5_true);
            }
        }
        points
    }

    /// `method,fare_or_frat5bin,share` for one frat5 point.
    pub fn write_detailed_csv<W: Write>(&self, frat5_true: f64, mut w: W) -> io::Result<()> {
        writeln!(w, "method,fare_or_frat5bin,share")?;
        for r in self.detailed.iter().filter(|r| r.frat5_true == frat5_true) {
            writeln!(w, "{},{},{}", r.method, r.key, r.share)?;
        }
        Ok(())
    }
}

/// Closed-form per-step revenue of always pricing the best fare, under true
/// demand.
pub fn optimal_step_revenue(frat5_true: f64, config: &EpisodeConfig) -> Result<f64> {
    let params = DemandParams::from_frat5(config.nu_true, frat5_true)?;
    let profile = crate::fares::demand_profile(&params, &config.structure);
    let best = profile
        .iter()
        .enumerate()
        .map(|(i, &d)| config.structure.fare_dollars(i).expect("index in range") * d)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(config.horizon as f64 * best)
}

/// Closed-form per-step revenue of uniform-random pricing under true demand.
pub fn random_step_revenue(frat5_true: f64, config: &EpisodeConfig) -> Result<f64> {
    let params = DemandParams::from_frat5(config.nu_true, frat5_true)?;
    let profile = crate::fares::demand_profile(&params, &config.structure);
    let avg = profile
        .iter()
        .enumerate()
        .map(|(i, &d)| config.structure.fare_dollars(i).expect("index in range") * d)
        .sum::<f64>()
        / config.structure.n() as f64;
    Ok(config.horizon as f64 * avg)
}

/// Rescales a mean per-step revenue so the always-best policy maps to 1 and
/// uniform-random pricing maps to 0.
pub fn normalized_revenue(
    mean_step_rev: f64,
    frat5_true: f64,
    config: &EpisodeConfig,
) -> Result<f64> {
    let r_opt = optimal_step_revenue(frat5_true, config)?;
    let r_rand = random_step_revenue(frat5_true, config)?;
    let denom = r_opt - r_rand;
    if !(denom > 1e-9) {
        return Err(Error::DegenerateNormalization(frat5_true));
    }
    Ok((mean_step_rev - r_rand) / denom)
}

/// Pooled mean squared error of the estimates against the true coefficient,
/// over all episodes and steps.
pub fn mse_phi(trajectories: &[Vec<f64>], phi_true: f64) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for traj in trajectories {
        for &p in traj {
            sum += (p - phi_true).powi(2);
            count += 1;
        }
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Runs every episode and folds each full result down immediately, in
/// parallel when the `parallel` feature is on. Output order always matches
/// input order, so results are identical for any worker count.
#[cfg(feature = "parallel")]
pub fn run_batch<T, F>(configs: &[EpisodeConfig], fold: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&EpisodeConfig, EpisodeResult) -> T + Sync,
{
    use rayon::prelude::*;
    configs
        .par_iter()
        .map(|c| run_episode(c).map(|r| fold(c, r)))
        .collect()
}

#[cfg(not(feature = "parallel"))]
pub fn run_batch<T, F>(configs: &[EpisodeConfig], fold: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&EpisodeConfig, EpisodeResult) -> T + Sync,
{
    run_batch_sequential(configs, fold)
}

/// Single-threaded equivalent of [`run_batch`].
pub fn run_batch_sequential<T, F>(configs: &[EpisodeConfig], fold: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&EpisodeConfig, EpisodeResult) -> T + Sync,
{
    configs
        .iter()
        .map(|c| run_episode(c).map(|r| fold(c, r)))
        .collect()
}

fn episode_metrics(config: &EpisodeConfig, result: &EpisodeResult) -> (f64, f64) {
    let norm = normalized_revenue(
        result.mean_step_revenue_dollars(),
        config.frat5_true,
        config,
    )
    .expect("default-ladder normalization is non-degenerate");
    let phi_true = phi_from_frat5(config.frat5_true).expect("validated frat5");
    let mse = mean(
        &result
            .phi_hat_trajectory
            .iter()
            .map(|&p| (p - phi_true).powi(2))
            .collect::<Vec<_>>(),
    );
    (norm, mse)
}

fn aggregate_row(
    parameter: f64,
    method: Option<PolicyKind>,
    metrics: Vec<(f64, f64)>,
) -> SweepRow {
    let norm: Vec<f64> = metrics.iter().map(|m| m.0).collect();
    let mse: Vec<f64> = metrics.iter().map(|m| m.1).collect();
    SweepRow {
        parameter,
        method,
        norm_rev: mean(&norm),
        norm_rev_ci99: ci99_half_width(&norm),
        mse: mean(&mse),
        mse_ci99: ci99_half_width(&mse),
        per_episode_norm_rev: norm,
        per_episode_mse: mse,
    }
}

/// η sweep: for each η, episodes with true frat5 drawn uniformly from the
/// interval; the draw and the market seed of episode e are the same at
/// every η.
pub fn run_eta_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let etas = spec.resolved_eta_values();
    let episode_configs: Vec<(u64, f64)> = (0..spec.episodes_per_point)
        .map(|e| (spec.episode_seed(e), spec.episode_frat5(e)))
        .collect();
    let mut rows = Vec::with_capacity(etas.len());
    for &eta in &etas {
        let configs: Vec<EpisodeConfig> = episode_configs
            .iter()
            .map(|&(seed, frat5)| EpisodeConfig {
                frat5_true: frat5,
                eta,
                policy_kind: PolicyKind::Unified,
                seed,
                ..spec.base.clone()
            })
            .collect();
        let metrics = run_batch(&configs, |c, r| episode_metrics(c, &r))?;
        rows.push(aggregate_row(eta, None, metrics));
    }
    Ok(SweepResult {
        kind: SweepKind::EtaSweep,
        rows,
        detailed: Vec::new(),
    })
}

/// frat5 grid: greedy and unified at η = `eta_fixed`, every point and both
/// methods sharing episode seeds.
pub fn run_frat5_grid(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let seeds: Vec<u64> = (0..spec.episodes_per_point)
        .map(|e| spec.episode_seed(e))
        .collect();
    let mut rows = Vec::new();
    for &frat5 in &spec.frat5_points {
        for method in [PolicyKind::Greedy, PolicyKind::Unified] {
            let configs: Vec<EpisodeConfig> = seeds
                .iter()
                .map(|&seed| EpisodeConfig {
                    frat5_true: frat5,
                    eta: spec.eta_fixed,
                    policy_kind: method,
                    seed,
                    ..spec.base.clone()
                })
                .collect();
            let metrics = run_batch(&configs, |c, r| episode_metrics(c, &r))?;
            rows.push(aggregate_row(frat5, Some(method), metrics));
        }
    }
    Ok(SweepResult {
        kind: SweepKind::Frat5Grid,
        rows,
        detailed: Vec::new(),
    })
}

fn frat5_bins(config: &EpisodeConfig) -> (f64, usize) {
    let lo = config.clamp.min();
    let hi = config.clamp.max();
    let n = ((hi - lo) / FRAT5_BIN_WIDTH).round().max(1.0) as usize;
    (lo, n)
}

fn bin_index(value: f64, lo: f64, n_bins: usize) -> usize {
    (((value - lo) / FRAT5_BIN_WIDTH).floor() as isize).clamp(0, n_bins as isize - 1) as usize
}

fn fare_key(cents: i64) -> String {
    if cents % 100 == 0 {
        format!("fare_{}", cents / 100)
    } else {
        format!("fare_{}.{:02}", cents / 100, cents % 100)
    }
}

/// Detailed view: offered-fare and estimated-frat5 histograms per method at
/// each configured frat5 point.
pub fn run_detailed_view(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let seeds: Vec<u64> = (0..spec.episodes_per_point)
        .map(|e| spec.episode_seed(e))
        .collect();
    let (bin_lo, n_bins) = frat5_bins(&spec.base);
    let mut detailed = Vec::new();
    for &frat5 in &spec.frat5_points {
        for method in [PolicyKind::Greedy, PolicyKind::Unified] {
            let configs: Vec<EpisodeConfig> = seeds
                .iter()
                .map(|&seed| EpisodeConfig {
                    frat5_true: frat5,
                    eta: spec.eta_fixed,
                    policy_kind: method,
                    seed,
                    ..spec.base.clone()
                })
                .collect();
            let folds = run_batch(&configs, |_, r| {
                let mut bins = vec![0u64; n_bins];
                for &f5 in &r.frat5_hat_trajectory {
                    bins[bin_index(f5, bin_lo, n_bins)] += 1;
                }
                (r.fare_offer_histogram, bins)
            })?;
            let n = spec.base.structure.n();
            let mut offer_totals = vec![0u64; n];
            let mut bin_totals = vec![0u64; n_bins];
            for (offers, bins) in folds {
                for (t, o) in offer_totals.iter_mut().zip(offers) {
                    *t += o;
                }
                for (t, b) in bin_totals.iter_mut().zip(bins) {
                    *t += b;
                }
            }
            let offers_sum: u64 = offer_totals.iter().sum();
            for (i, &count) in offer_totals.iter().enumerate() {
                detailed.push(DetailedRow {
                    frat5_true: frat5,
                    method,
                    key: fare_key(spec.base.structure.fare_cents(i)?),
                    share: count as f64 / offers_sum as f64,
                });
            }
            let bins_sum: u64 = bin_totals.iter().sum();
            for (k, &count) in bin_totals.iter().enumerate() {
                detailed.push(DetailedRow {
                    frat5_true: frat5,
                    method,
                    key: format!("frat5_{:.2}", bin_lo + k as f64 * FRAT5_BIN_WIDTH),
                    share: count as f64 / bins_sum as f64,
                });
            }
        }
    }
    Ok(SweepResult {
        kind: SweepKind::Detailed,
        rows: Vec::new(),
        detailed,
    })
}
