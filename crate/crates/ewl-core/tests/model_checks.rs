//! Cross-checks of the closed-form model quantities against brute force:
//! Monte Carlo offer allocations, exhaustive simplex sampling, and long
//! simulation runs compared with analytic means.

use ewl_core::estimator::{fisher_information, Frat5Clamp};
use ewl_core::fares::{demand_profile, phi_from_frat5, DemandParams, FareStructure};
use ewl_core::harness::run_batch;
use ewl_core::history::{HistoryWindow, SellDateRecord};
use ewl_core::policy::{
    maximize_unified, policy_fisher_information, unified_objective, ObjectiveContext,
    PricingPolicy,
};
use ewl_core::rng::{derive_seed, keyed_rng};
use ewl_core::simulator::{burn_in, sample_bookings, EpisodeConfig, PolicyKind};
use rand::Rng;

const NU: f64 = 0.18;
const HORIZON: usize = 22;

fn window_with(records: &[(u64, Vec<u32>, Vec<u32>)], n_fares: usize) -> HistoryWindow {
    let mut w = HistoryWindow::new(HORIZON, n_fares);
    for (t, offers, bookings) in records {
        w.append(SellDateRecord::new(*t, offers.clone(), bookings.clone()).unwrap())
            .unwrap();
    }
    w
}

fn draw_index(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Per-flight mean and variance of a statistic g(fare) of one offered flight:
/// the fare is drawn from `pi`, then bookings are Poisson with the fare's
/// demand, and the statistic is g = weight_i per booking at fare i.
fn flight_moments(pi: &[f64], demand: &[f64], weight: &[f64]) -> (f64, f64) {
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for ((&p, &d), &w) in pi.iter().zip(demand).zip(weight) {
        m1 += p * w * d;
        m2 += p * w * w * (d + d * d);
    }
    (m1, m2 - m1 * m1)
}

#[test]
fn policy_information_matches_sampled_offer_expectation() {
    let s = FareStructure::default_ladder();
    let phi = phi_from_frat5(2.8).unwrap();
    let window = window_with(
        &[
            (0, vec![4, 3, 2, 2, 3, 1, 2, 2, 2, 1], vec![2, 1, 0, 1, 0, 0, 1, 0, 0, 0]),
            (1, vec![1, 2, 3, 4, 3, 2, 1, 2, 2, 2], vec![0, 1, 1, 1, 0, 1, 0, 0, 1, 0]),
            (2, vec![2, 2, 2, 2, 2, 2, 2, 2, 2, 4], vec![1, 0, 0, 0, 1, 0, 0, 0, 0, 1]),
            (3, vec![5, 1, 1, 3, 2, 2, 3, 2, 1, 2], vec![1, 1, 0, 2, 0, 0, 0, 1, 0, 0]),
            (4, vec![3, 3, 2, 1, 2, 3, 2, 2, 2, 2], vec![2, 0, 1, 0, 0, 1, 0, 0, 0, 0]),
        ],
        s.n(),
    );
    let ctx = ObjectiveContext::new(&window, phi, NU, HORIZON, 1000.0, &s).unwrap();
    let weights: Vec<f64> = (1..=s.n()).map(|k| k as f64).collect();
    let pi = PricingPolicy::new(weights).unwrap();
    let closed = policy_fisher_information(&pi, &ctx).unwrap();

    // The information is linear in future offer counts, so the mean over
    // multinomial allocations of H flights must converge to the closed form.
    let mut rng = keyed_rng(7, 1, 2, 3);
    let trials = 100_000;
    let mut acc = 0.0;
    let mut counts = vec![0.0; s.n()];
    for _ in 0..trials {
        counts.iter_mut().for_each(|c| *c = 0.0);
        for _ in 0..HORIZON {
            counts[draw_index(pi.probs(), rng.random())] += 1.0;
        }
        acc += fisher_information(&window, phi, NU, &s, Some(&counts)).unwrap();
    }
    let sampled = acc / trials as f64;
    let rel = (sampled - closed).abs() / closed;
    assert!(
        rel < 2e-3,
        "sampled {sampled} vs closed {closed}, rel {rel}"
    );
}

#[test]
fn maximizer_beats_exhaustive_simplex_sampling() {
    let s = FareStructure::from_dollars(&[50.0, 90.0, 150.0]).unwrap();
    let phi = phi_from_frat5(2.4).unwrap();
    let window = window_with(
        &[
            (0, vec![8, 7, 7], vec![2, 1, 0]),
            (1, vec![7, 8, 7], vec![1, 1, 1]),
            (2, vec![7, 7, 8], vec![2, 0, 1]),
        ],
        s.n(),
    );
    let ctx = ObjectiveContext::new(&window, phi, NU, HORIZON, 1500.0, &s).unwrap();
    let res = maximize_unified(&ctx);
    assert!(res.converged);

    let mut rng = keyed_rng(11, 5, 0, 0);
    let mut best_sampled = f64::NEG_INFINITY;
    for _ in 0..1_000_000 {
        // Exponential spacings give a uniform draw over the simplex.
        let e: Vec<f64> = (0..s.n())
            .map(|_| -(1.0 - rng.random::<f64>()).ln())
            .collect();
        let pi = PricingPolicy::new(e).unwrap();
        let u = unified_objective(&pi, &ctx).unwrap();
        if u > best_sampled {
            best_sampled = u;
        }
    }
    assert!(
        res.value >= best_sampled - 1e-4,
        "optimizer {} vs sampled max {}",
        res.value,
        best_sampled
    );
}

#[test]
fn sampled_bookings_match_expected_rate() {
    let s = FareStructure::default_ladder();
    let params = DemandParams::from_frat5(NU, 3.0).unwrap();
    let demand = demand_profile(&params, &s);
    let pi = PricingPolicy::uniform(s.n()).unwrap();
    let ones = vec![1.0; s.n()];
    let (m1, v1) = flight_moments(pi.probs(), &demand, &ones);

    let sell_dates = 100_000u64;
    let mut total = 0u64;
    for t in 0..sell_dates {
        let rec = sample_bookings(&pi, &params, &s, HORIZON, 42, t).unwrap();
        total += rec.bookings().iter().map(|&b| b as u64).sum::<u64>();
    }
    let mean = total as f64 / sell_dates as f64;
    let expected = HORIZON as f64 * m1;
    let se = (HORIZON as f64 * v1 / sell_dates as f64).sqrt();
    assert!(
        (mean - expected).abs() < 3.5 * se,
        "mean {mean} vs expected {expected} (se {se})"
    );
}

#[test]
fn burn_in_offers_are_uniform_across_fares() {
    let s = FareStructure::default_ladder();
    let mut totals = vec![0u64; s.n()];
    for k in 0..200 {
        let config = EpisodeConfig::baseline(
            PolicyKind::Greedy,
            2.56,
            0.0,
            derive_seed(99, 0x4255_524e, k),
        );
        let window = burn_in(&config).unwrap();
        for (t, &o) in window.offer_totals(window.len()).unwrap().iter().enumerate() {
            totals[t] += o;
        }
    }
    let grand: u64 = totals.iter().sum();
    assert_eq!(grand, 200 * (HORIZON * HORIZON) as u64);
    let expected = grand as f64 / s.n() as f64;
    let chi2: f64 = totals
        .iter()
        .map(|&o| {
            let d = o as f64 - expected;
            d * d / expected
        })
        .sum();
    // 99.9th percentile of chi-squared with 9 degrees of freedom.
    assert!(chi2 < 27.88, "chi2 {chi2}, totals {totals:?}");
}

fn mean_step_revenue(configs: &[EpisodeConfig]) -> f64 {
    let revs = run_batch(configs, |_, r| r.mean_step_revenue_dollars()).unwrap();
    revs.iter().sum::<f64>() / revs.len() as f64
}

#[test]
fn pinned_greedy_episode_revenue_matches_closed_form() {
    // A pinned clamp fixes the estimate at the true frat5, so greedy always
    // offers the revenue-maximizing fare and the mean per-sell-date revenue
    // has a closed form.
    let s = FareStructure::default_ladder();
    let params = DemandParams::from_frat5(NU, 2.56).unwrap();
    let demand = demand_profile(&params, &s);
    let fares: Vec<f64> = (0..s.n()).map(|i| s.fare_dollars(i).unwrap()).collect();

    let configs: Vec<EpisodeConfig> = (0..300)
        .map(|k| {
            let mut c = EpisodeConfig::baseline(
                PolicyKind::Greedy,
                2.56,
                0.0,
                derive_seed(123, 0x4752_4544, k),
            );
            c.clamp = Frat5Clamp::new(2.56, 2.56).unwrap();
            c.steps = 100;
            c
        })
        .collect();
    let mean = mean_step_revenue(&configs);

    let mut point = vec![0.0; s.n()];
    let greedy = ewl_core::fares::greedy_fare(&params, &s);
    point[greedy] = 1.0;
    let (m1, v1) = flight_moments(&point, &demand, &fares);
    let expected = HORIZON as f64 * m1;
    let se = (HORIZON as f64 * v1 / (300.0 * 100.0)).sqrt();
    assert!(
        (mean - expected).abs() < 3.5 * se,
        "mean {mean} vs expected {expected} (se {se})"
    );
}

#[test]
fn random_episode_revenue_matches_closed_form() {
    let s = FareStructure::default_ladder();
    let params = DemandParams::from_frat5(NU, 2.56).unwrap();
    let demand = demand_profile(&params, &s);
    let fares: Vec<f64> = (0..s.n()).map(|i| s.fare_dollars(i).unwrap()).collect();

    let configs: Vec<EpisodeConfig> = (0..300)
        .map(|k| {
            let mut c = EpisodeConfig::baseline(
                PolicyKind::Random,
                2.56,
                0.0,
                derive_seed(124, 0x5241_4e44, k),
            );
            c.steps = 100;
            c
        })
        .collect();
    let mean = mean_step_revenue(&configs);

    let uniform = vec![1.0 / s.n() as f64; s.n()];
    let (m1, v1) = flight_moments(&uniform, &demand, &fares);
    let expected = HORIZON as f64 * m1;
    let se = (HORIZON as f64 * v1 / (300.0 * 100.0)).sqrt();
    assert!(
        (mean - expected).abs() < 3.5 * se,
        "mean {mean} vs expected {expected} (se {se})"
    );
}
