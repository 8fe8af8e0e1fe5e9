//! Market simulation: each sell date a policy prices all H active flights,
//! Poisson bookings are sampled from true demand, the history window rolls
//! forward, and the sensitivity estimate is refreshed.
//!
//! An episode starts with H burn-in sell dates priced uniformly at random;
//! their revenue is excluded from every reported metric.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::estimator::{estimate_phi, Frat5Clamp};
use crate::fares::{demand_profile, greedy_fare, DemandParams, FareStructure};
use crate::history::{HistoryWindow, SellDateRecord};
use crate::policy::{maximize_unified, random_policy, ObjectiveContext, PricingPolicy};
use crate::rng::keyed_rng;

pub const DEFAULT_HORIZON: usize = 22;
pub const DEFAULT_NU: f64 = 0.18;
pub const DEFAULT_STEPS: usize = 440;

const STREAM_MARKET: u64 = 0x4d41_524b;

/// How the per-step policy is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    /// Point mass at the revenue-maximizing fare for the current estimate.
    Greedy,
    /// Maximizer of the unified revenue/information objective at η.
    Unified,
    /// Uniform over the ladder, ignoring the estimate.
    Random,
}

impl PolicyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::Greedy => "greedy",
            PolicyKind::Unified => "unified",
            PolicyKind::Random => "random",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(PolicyKind::Greedy),
            "unified" => Ok(PolicyKind::Unified),
            "random" => Ok(PolicyKind::Random),
            other => Err(Error::InvalidEpisodeConfig(format!(
                "unknown policy kind {other:?}, expected greedy, unified or random"
            ))),
        }
    }
}

/// Full description of one episode.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeConfig {
    pub structure: FareStructure,
    /// Active flights per sell date, also the history window capacity.
    pub horizon: usize,
    pub nu_true: f64,
    pub frat5_true: f64,
    pub clamp: Frat5Clamp,
    pub eta: f64,
    /// Measured sell dates after burn-in.
    pub steps: usize,
    pub policy_kind: PolicyKind,
    pub seed: u64,
}

impl EpisodeConfig {
    /// Baseline setup: ladder $50..$230 step $20, H=22, ν=0.18,
    /// clamp [1.5, 4.3], 440 measured steps.
    pub fn baseline(policy_kind: PolicyKind, frat5_true: f64, eta: f64, seed: u64) -> Self {
        Self {
            structure: FareStructure::default_ladder(),
            horizon: DEFAULT_HORIZON,
            nu_true: DEFAULT_NU,
            frat5_true,
            clamp: Frat5Clamp::default(),
            eta,
            steps: DEFAULT_STEPS,
            policy_kind,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 1 {
            return Err(Error::InvalidEpisodeConfig("steps must be >= 1".into()));
        }
        if self.horizon < 1 {
            return Err(Error::InvalidEpisodeConfig("horizon must be >= 1".into()));
        }
        if !(self.nu_true > 0.0) || !self.nu_true.is_finite() {
            return Err(Error::InvalidEpisodeConfig(format!(
                "true arrival rate must be positive, got {}",
                self.nu_true
            )));
        }
        if !(self.frat5_true > 1.0) || !self.frat5_true.is_finite() {
            return Err(Error::InvalidEpisodeConfig(format!(
                "true frat5 must be > 1, got {}",
                self.frat5_true
            )));
        }
        if !(self.eta >= 0.0) || !self.eta.is_finite() {
            return Err(Error::InvalidEpisodeConfig(format!(
                "eta must be >= 0, got {}",
                self.eta
            )));
        }
        Ok(())
    }

    pub fn true_params(&self) -> Result<DemandParams> {
        DemandParams::from_frat5(self.nu_true, self.frat5_true)
    }
}

/// Everything recorded over the measured steps of one episode.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub total_revenue_cents: i64,
    pub per_step_revenue_cents: Vec<i64>,
    pub phi_hat_trajectory: Vec<f64>,
    pub frat5_hat_trajectory: Vec<f64>,
    pub policy_trajectory: Vec<PricingPolicy>,
    /// Offer counts per ladder index, totalled over measured steps.
    pub fare_offer_histogram: Vec<u64>,
    pub degenerate_estimation_count: usize,
    pub optimizer_warning_count: usize,
    /// Measured sell-date records, oldest first.
    pub records: Vec<SellDateRecord>,
}

impl EpisodeResult {
    pub fn total_revenue_dollars(&self) -> f64 {
        self.total_revenue_cents as f64 / 100.0
    }

    pub fn mean_step_revenue_dollars(&self) -> f64 {
        self.total_revenue_dollars() / self.per_step_revenue_cents.len() as f64
    }

    /// Trace CSV, one row per (step, fare): step-level revenue, estimate and
    /// policy repeat across the fares of a step.
    pub fn write_trace_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let n = self.fare_offer_histogram.len();
        write!(w, "step,fare_index,offers,bookings,revenue,phi_hat")?;
        for i in 0..n {
            write!(w, ",pi_{i}")?;
        }
        writeln!(w)?;
        for (k, rec) in self.records.iter().enumerate() {
            let cents = self.per_step_revenue_cents[k];
            let phi = self.phi_hat_trajectory[k];
            let pi = &self.policy_trajectory[k];
            for i in 0..n {
                write!(
                    w,
                    "{k},{i},{},{},{}.{:02},{phi}",
                    rec.offers()[i],
                    rec.bookings()[i],
                    cents / 100,
                    cents % 100,
                )?;
                for p in pi.probs() {
                    write!(w, ",{p}")?;
                }
                writeln!(w)?;
            }
        }
        Ok(())
    }
}

/// Per-episode market sampler with the true demand profile precomputed.
struct MarketSampler {
    dists: Vec<Option<Poisson<f64>>>,
    fares_cents: Vec<i64>,
    horizon: usize,
    seed: u64,
}

impl MarketSampler {
    fn new(
        true_params: &DemandParams,
        structure: &FareStructure,
        horizon: usize,
        seed: u64,
    ) -> Result<Self> {
        if horizon < 1 {
            return Err(Error::InvalidEpisodeConfig("horizon must be >= 1".into()));
        }
        let profile = demand_profile(true_params, structure);
        let dists = profile
            .iter()
            .map(|&d| {
                if d > 0.0 {
                    Some(Poisson::new(d).expect("positive mean"))
                } else {
                    None
                }
            })
            .collect();
        Ok(Self {
            dists,
            fares_cents: structure.fares_cents().to_vec(),
            horizon,
            seed,
        })
    }

    /// One sell date: each flight draws a fare from π, then bookings from
    /// the true Poisson demand at that fare. Each (sell_date, flight) cell
    /// has its own random stream.
    fn sample(&self, pi: &PricingPolicy, sell_date: u64) -> SellDateRecord {
        let n = self.fares_cents.len();
        let mut offers = vec![0u32; n];
        let mut bookings = vec![0u32; n];
        for flight in 0..self.horizon as u64 {
            let mut rng = keyed_rng(self.seed, STREAM_MARKET, sell_date, flight);
            let u: f64 = rng.random();
            let idx = sample_index(pi.probs(), u);
            offers[idx] += 1;
            if let Some(dist) = &self.dists[idx] {
                bookings[idx] += dist.sample(&mut rng) as u32;
            }
        }
        SellDateRecord::new(sell_date, offers, bookings).expect("bookings imply offers")
    }

    fn revenue_cents(&self, rec: &SellDateRecord) -> i64 {
        rec.bookings()
            .iter()
            .zip(&self.fares_cents)
            .map(|(&b, &f)| i64::from(b) * f)
            .sum()
    }
}

fn sample_index(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// One sell date of market randomness under policy `pi`, with true demand.
pub fn sample_bookings(
    pi: &PricingPolicy,
    true_params: &DemandParams,
    structure: &FareStructure,
    horizon: usize,
    seed: u64,
    sell_date: u64,
) -> Result<SellDateRecord> {
    if pi.n() != structure.n() {
        return Err(Error::FareCountMismatch {
            got: pi.n(),
            expected: structure.n(),
        });
    }
    Ok(MarketSampler::new(true_params, structure, horizon, seed)?.sample(pi, sell_date))
}

/// H uniformly priced sell dates (dates 0..H−1) that seed the window before
/// measurement starts.
pub fn burn_in(config: &EpisodeConfig) -> Result<HistoryWindow> {
    config.validate()?;
    let sampler = MarketSampler::new(
        &config.true_params()?,
        &config.structure,
        config.horizon,
        config.seed,
    )?;
    let uniform = random_policy(&config.structure);
    let mut window = HistoryWindow::new(config.horizon, config.structure.n());
    for t in 0..config.horizon as u64 {
        window.append(sampler.sample(&uniform, t))?;
    }
    Ok(window)
}

/// Runs one full episode: burn-in, then `steps` measured sell dates of
/// estimate → price → sample → archive. Deterministic given the config.
pub fn run_episode(config: &EpisodeConfig) -> Result<EpisodeResult> {
    config.validate()?;
    let n = config.structure.n();
    let true_params = config.true_params()?;
    let sampler = MarketSampler::new(&true_params, &config.structure, config.horizon, config.seed)?;
    let uniform = random_policy(&config.structure);

    let mut window = HistoryWindow::new(config.horizon, n);
    for t in 0..config.horizon as u64 {
        window.append(sampler.sample(&uniform, t))?;
    }

    let mut result = EpisodeResult {
        total_revenue_cents: 0,
        per_step_revenue_cents: Vec::with_capacity(config.steps),
        phi_hat_trajectory: Vec::with_capacity(config.steps),
        frat5_hat_trajectory: Vec::with_capacity(config.steps),
        policy_trajectory: Vec::with_capacity(config.steps),
        fare_offer_histogram: vec![0u64; n],
        degenerate_estimation_count: 0,
        optimizer_warning_count: 0,
        records: Vec::with_capacity(config.steps),
    };

    for k in 0..config.steps {
        let sell_date = (config.horizon + k) as u64;
        let est = estimate_phi(&window, config.nu_true, &config.structure, config.clamp)?;
        if est.degenerate {
            result.degenerate_estimation_count += 1;
        }
        let pi = match config.policy_kind {
            PolicyKind::Random => uniform.clone(),
            PolicyKind::Greedy => {
                let params = DemandParams::from_phi(config.nu_true, est.phi_hat)?;
                let idx = greedy_fare(&params, &config.structure);
                PricingPolicy::point_mass(idx, n)?
            }
            PolicyKind::Unified => {
                let ctx = ObjectiveContext::new(
                    &window,
                    est.phi_hat,
                    config.nu_true,
                    config.horizon,
                    config.eta,
                    &config.structure,
                )?;
                let opt = maximize_unified(&ctx);
                if !opt.converged {
                    result.optimizer_warning_count += 1;
                }
                opt.policy
            }
        };

        let rec = sampler.sample(&pi, sell_date);
        let rev = sampler.revenue_cents(&rec);
        result.total_revenue_cents += rev;
        result.per_step_revenue_cents.push(rev);
        result.phi_hat_trajectory.push(est.phi_hat);
        result.frat5_hat_trajectory.push(est.frat5_hat);
        result.policy_trajectory.push(pi);
        for (h, &o) in result.fare_offer_histogram.iter_mut().zip(rec.offers()) {
            *h += u64::from(o);
        }
        window.append(rec.clone())?;
        result.records.push(rec);
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ladder() -> FareStructure {
        FareStructure::default_ladder()
    }

    #[test]
    fn policy_kind_round_trip() {
        for kind in [PolicyKind::Greedy, PolicyKind::Unified, PolicyKind::Random] {
            assert_eq!(kind.as_str().parse::<PolicyKind>().unwrap(), kind);
        }
        assert!("cvp".parse::<PolicyKind>().is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = EpisodeConfig::baseline(PolicyKind::Greedy, 2.56, 0.0, 1);
        assert!(c.validate().is_ok());
        c.steps = 0;
        assert!(c.validate().is_err());
        c.steps = 1;
        c.nu_true = 0.0;
        assert!(c.validate().is_err());
        c.nu_true = 0.18;
        c.frat5_true = 1.0;
        assert!(c.validate().is_err());
        c.frat5_true = 2.5;
        c.eta = -1.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn zero_arrivals_mean_zero_bookings() {
        let s = ladder();
        let params = DemandParams::from_frat5(0.0, 2.56).unwrap();
        let pi = random_policy(&s);
        let rec = sample_bookings(&pi, &params, &s, 22, 9, 0).unwrap();
        assert_eq!(rec.offers().iter().map(|&o| u64::from(o)).sum::<u64>(), 22);
        assert!(rec.bookings().iter().all(|&b| b == 0));
    }

    #[test]
    fn point_mass_offers_concentrate() {
        let s = ladder();
        let params = DemandParams::from_frat5(0.18, 2.56).unwrap();
        let pi = PricingPolicy::point_mass(0, s.n()).unwrap();
        let rec = sample_bookings(&pi, &params, &s, 22, 5, 3).unwrap();
        assert_eq!(rec.offers()[0], 22);
        assert!(rec.offers()[1..].iter().all(|&o| o == 0));
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let s = ladder();
        let params = DemandParams::from_frat5(0.18, 2.56).unwrap();
        let pi = random_policy(&s);
        let a = sample_bookings(&pi, &params, &s, 22, 77, 4).unwrap();
        let b = sample_bookings(&pi, &params, &s, 22, 77, 4).unwrap();
        assert_eq!(a, b);
        let c = sample_bookings(&pi, &params, &s, 22, 78, 4).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn burn_in_fills_window() {
        let config = EpisodeConfig::baseline(PolicyKind::Greedy, 2.56, 0.0, 11);
        let w = burn_in(&config).unwrap();
        assert_eq!(w.len(), config.horizon);
        assert_eq!(w.oldest_sell_date(), Some(0));
        let again = burn_in(&config).unwrap();
        assert_eq!(w, again);
    }

    #[test]
    fn episode_is_deterministic() {
        let mut config = EpisodeConfig::baseline(PolicyKind::Unified, 2.56, 2167.0, 31);
        config.steps = 40;
        let a = run_episode(&config).unwrap();
        let b = run_episode(&config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn revenue_and_offer_accounting() {
        let mut config = EpisodeConfig::baseline(PolicyKind::Unified, 2.1, 2167.0, 3);
        config.steps = 50;
        let r = run_episode(&config).unwrap();
        assert_eq!(r.per_step_revenue_cents.len(), 50);
        assert_eq!(r.per_step_revenue_cents.iter().sum::<i64>(), r.total_revenue_cents);
        let recomputed: i64 = r
            .records
            .iter()
            .map(|rec| {
                rec.bookings()
                    .iter()
                    .zip(config.structure.fares_cents())
                    .map(|(&b, &f)| i64::from(b) * f)
                    .sum::<i64>()
            })
            .sum();
        assert_eq!(recomputed, r.total_revenue_cents);
        assert_eq!(
            r.fare_offer_histogram.iter().sum::<u64>(),
            (config.horizon * config.steps) as u64
        );
        for rec in &r.records {
            assert_eq!(
                rec.offers().iter().map(|&o| u64::from(o)).sum::<u64>(),
                config.horizon as u64
            );
        }
    }

    #[test]
    fn unified_at_eta_zero_replays_greedy_episode() {
        for seed in [1u64, 2, 3, 4, 5] {
            let mut greedy = EpisodeConfig::baseline(PolicyKind::Greedy, 2.3, 0.0, seed);
            greedy.steps = 60;
            let mut unified = greedy.clone();
            unified.policy_kind = PolicyKind::Unified;
            let g = run_episode(&greedy).unwrap();
            let u = run_episode(&unified).unwrap();
            assert_eq!(g.records, u.records);
            assert_eq!(g.per_step_revenue_cents, u.per_step_revenue_cents);
            assert_eq!(g.phi_hat_trajectory, u.phi_hat_trajectory);
            assert_eq!(g.policy_trajectory, u.policy_trajectory);
        }
    }

    #[test]
    fn trace_csv_shape() {
        let mut config = EpisodeConfig::baseline(PolicyKind::Random, 2.56, 0.0, 8);
        config.steps = 3;
        let r = run_episode(&config).unwrap();
        let mut out = Vec::new();
        r.write_trace_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("step,fare_index,offers,bookings,revenue,phi_hat,pi_0"));
        assert!(header.ends_with("pi_9"));
        assert_eq!(lines.count(), 3 * 10);
    }
}
