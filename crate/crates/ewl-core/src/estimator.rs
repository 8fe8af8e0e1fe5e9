//! Maximum-likelihood estimation of the price-sensitivity coefficient from a
//! history window, with Fisher information and the uncertainty lower bound.
//!
//! The arrival rate ν is treated as known; only φ is fitted. The likelihood
//! is evaluated on per-fare offer and booking totals, since the expected
//! demand at a fare does not depend on the sell date.

use crate::error::{Error, Result};
use crate::fares::{demand_at_ratio, frat5_from_phi, phi_from_frat5, FareStructure};
use crate::history::HistoryWindow;

/// Allowed frat5 range for estimates. Estimates outside are clamped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frat5Clamp {
    min: f64,
    max: f64,
}

impl Frat5Clamp {
    /// Requires 1 < min <= max. Equal bounds pin the estimate to one value,
    /// which is how a simulation injects a known-truth estimator.
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min > 1.0 && max >= min && min.is_finite() && max.is_finite()) {
            return Err(Error::InvalidClampRange(min, max));
        }
        Ok(Self { min, max })
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.min + self.max)
    }

    /// Corresponding φ interval (low, high). frat5 and φ are inversely
    /// related, so the low φ bound comes from the max frat5.
    pub fn phi_interval(&self) -> (f64, f64) {
        (
            phi_from_frat5(self.max).expect("clamp bounds validated"),
            phi_from_frat5(self.min).expect("clamp bounds validated"),
        )
    }
}

impl Default for Frat5Clamp {
    fn default() -> Self {
        Self { min: 1.5, max: 4.3 }
    }
}

/// Outcome of [`estimate_phi`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationResult {
    /// Estimated coefficient, always inside the clamp interval.
    pub phi_hat: f64,
    /// frat5 equivalent of `phi_hat`.
    pub frat5_hat: f64,
    /// Fisher information at `phi_hat` over the window, in φ-units⁻².
    pub fisher_info: f64,
    /// Uncertainty lower bound 1/√I; +∞ when the window carries no
    /// information about φ.
    pub sigma: f64,
    /// The maximizer sat on a clamp bound.
    pub clamped: bool,
    /// The likelihood was flat in φ (no offers above the base fare), so
    /// `phi_hat` is the clamp midpoint rather than a maximizer.
    pub degenerate: bool,
}

const GRID_POINTS: usize = 256;
const GOLDEN_TOL: f64 = 1e-8;

/// Poisson log-likelihood of the window at a candidate φ, dropping the
/// φ-independent ln(o!) terms: Σ_f [ b_f·ln d(f) − o_f·d(f) ].
pub fn log_likelihood(
    window: &HistoryWindow,
    phi: f64,
    nu: f64,
    structure: &FareStructure,
) -> Result<f64> {
    let (ratios, offers, bookings) = window_totals(window, phi, nu, structure)?;
    Ok(ll_from_totals(phi, nu, &ratios, &offers, &bookings))
}

/// Analytic d/dφ of [`log_likelihood`], for diagnostics and gradient checks.
pub fn log_likelihood_grad(
    window: &HistoryWindow,
    phi: f64,
    nu: f64,
    structure: &FareStructure,
) -> Result<f64> {
    let (ratios, offers, bookings) = window_totals(window, phi, nu, structure)?;
    let mut g = 0.0;
    for ((&r, &o), &b) in ratios.iter().zip(&offers).zip(&bookings) {
        if o == 0 && b == 0 {
            continue;
        }
        let s = r - 1.0;
        let d = demand_at_ratio(r, nu, phi);
        g += s * (o as f64 * d - b as f64);
    }
    Ok(g)
}

/// Fisher information I(φ) = Σ_f o_f·d(f)·(f/f0 − 1)², over the full window
/// plus, when given, per-fare expected future offer counts weighted the same
/// way (policy-level information is built from this).
pub fn fisher_information(
    window: &HistoryWindow,
    phi: f64,
    nu: f64,
    structure: &FareStructure,
    extra_offers: Option<&[f64]>,
) -> Result<f64> {
    let (ratios, offers, _) = window_totals(window, phi, nu, structure)?;
    let mut counts: Vec<f64> = offers.iter().map(|&o| o as f64).collect();
    if let Some(extra) = extra_offers {
        if extra.len() != structure.n() {
            return Err(Error::FareCountMismatch {
                got: extra.len(),
                expected: structure.n(),
            });
        }
        for (i, (&e, c)) in extra.iter().zip(&mut counts).enumerate() {
            if !(e >= 0.0) {
                return Err(Error::NegativeExpectedOffers(i));
            }
            *c += e;
        }
    }
    let mut info = 0.0;
    for (&r, &c) in ratios.iter().zip(&counts) {
        if c == 0.0 {
            continue;
        }
        let s = r - 1.0;
        info += c * demand_at_ratio(r, nu, phi) * s * s;
    }
    Ok(info)
}

/// σ = 1/√I, the Cramér-Rao lower bound on estimator spread; +∞ at I = 0.
pub fn sigma_bound(fisher_info: f64) -> Result<f64> {
    if fisher_info < 0.0 || fisher_info.is_nan() {
        return Err(Error::NegativeInformation(fisher_info));
    }
    if fisher_info == 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(1.0 / fisher_info.sqrt())
    }
}

/// Maximizes the window log-likelihood over the clamped φ interval.
///
/// Solver: 256-point log-spaced grid scan, then golden-section refinement of
/// the bracketing cell to |Δφ| < 1e−8. The grid step makes the bracket safe
/// even when the likelihood is monotone over the interval, in which case the
/// estimate lands on a bound and is flagged `clamped`.
pub fn estimate_phi(
    window: &HistoryWindow,
    nu: f64,
    structure: &FareStructure,
    clamp: Frat5Clamp,
) -> Result<EstimationResult> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::InvalidArrivalRate(nu));
    }
    if window.n_fares() != structure.n() {
        return Err(Error::FareCountMismatch {
            got: window.n_fares(),
            expected: structure.n(),
        });
    }
    let offers = window.offer_totals(window.len())?;
    let bookings = window.booking_totals(window.len())?;
    let ratios: Vec<f64> = (0..structure.n())
        .map(|i| structure.ratio(i).expect("index in range"))
        .collect();

    let (phi_lo, phi_hi) = clamp.phi_interval();

    // No offers above the base fare means LL is constant in φ.
    let informative = offers.iter().zip(&ratios).any(|(&o, &r)| o > 0 && r > 1.0);
    if !informative {
        let frat5_hat = clamp.midpoint();
        let phi_hat = phi_from_frat5(frat5_hat)?;
        return finish(phi_hat, frat5_hat, false, true, nu, &ratios, &offers);
    }
    if phi_lo == phi_hi {
        return finish(phi_lo, clamp.min(), true, false, nu, &ratios, &offers);
    }

    let ll = |phi: f64| ll_from_totals(phi, nu, &ratios, &offers, &bookings);

    let ln_lo = phi_lo.ln();
    let step = (phi_hi.ln() - ln_lo) / (GRID_POINTS - 1) as f64;
    let grid_phi = |k: usize| {
        if k == GRID_POINTS - 1 {
            phi_hi
        } else {
            (ln_lo + step * k as f64).exp()
        }
    };
    let mut best_k = 0;
    let mut best_ll = f64::NEG_INFINITY;
    for k in 0..GRID_POINTS {
        let v = ll(grid_phi(k));
        if v > best_ll {
            best_ll = v;
            best_k = k;
        }
    }
    let a = grid_phi(best_k.saturating_sub(1));
    let b = grid_phi((best_k + 1).min(GRID_POINTS - 1));
    let mut phi_hat = if a < b { golden_max(a, b, GOLDEN_TOL, ll) } else { a };

    let snap_tol = (phi_hi - phi_lo) * 1e-6;
    let (clamped, frat5_hat) = if phi_hat - phi_lo <= snap_tol {
        phi_hat = phi_lo;
        (true, clamp.max())
    } else if phi_hi - phi_hat <= snap_tol {
        phi_hat = phi_hi;
        (true, clamp.min())
    } else {
        (false, frat5_from_phi(phi_hat)?)
    };
    finish(phi_hat, frat5_hat, clamped, false, nu, &ratios, &offers)
}

fn finish(
    phi_hat: f64,
    frat5_hat: f64,
    clamped: bool,
    degenerate: bool,
    nu: f64,
    ratios: &[f64],
    offers: &[u64],
) -> Result<EstimationResult> {
    let mut info = 0.0;
    for (&r, &o) in ratios.iter().zip(offers) {
        if o == 0 {
            continue;
        }
        let s = r - 1.0;
        info += o as f64 * demand_at_ratio(r, nu, phi_hat) * s * s;
    }
    Ok(EstimationResult {
        phi_hat,
        frat5_hat,
        fisher_info: info,
        sigma: sigma_bound(info)?,
        clamped,
        degenerate,
    })
}

fn ll_from_totals(phi: f64, nu: f64, ratios: &[f64], offers: &[u64], bookings: &[u64]) -> f64 {
    let mut ll = 0.0;
    for ((&r, &o), &b) in ratios.iter().zip(offers).zip(bookings) {
        if o == 0 && b == 0 {
            continue;
        }
        let d = demand_at_ratio(r, nu, phi);
        if b > 0 {
            ll += b as f64 * d.ln();
        }
        ll -= o as f64 * d;
    }
    ll
}

fn window_totals(
    window: &HistoryWindow,
    phi: f64,
    nu: f64,
    structure: &FareStructure,
) -> Result<(Vec<f64>, Vec<u64>, Vec<u64>)> {
    if !(phi > 0.0) || !phi.is_finite() {
        return Err(Error::InvalidPhi(phi));
    }
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::InvalidArrivalRate(nu));
    }
    if window.n_fares() != structure.n() {
        return Err(Error::FareCountMismatch {
            got: window.n_fares(),
            expected: structure.n(),
        });
    }
    let ratios: Vec<f64> = (0..structure.n())
        .map(|i| structure.ratio(i).expect("index in range"))
        .collect();
    let offers = window.offer_totals(window.len())?;
    let bookings = window.booking_totals(window.len())?;
    Ok((ratios, offers, bookings))
}

/// Golden-section search for the maximum of a unimodal function on [a, b].
fn golden_max(mut a: f64, mut b: f64, tol: f64, f: impl Fn(f64) -> f64) -> f64 {
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fares::DemandParams;
    use crate::history::SellDateRecord;
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::Poisson;

    const NU: f64 = 0.18;

    fn ladder() -> FareStructure {
        FareStructure::default_ladder()
    }

    fn one_record_window(offers: Vec<u32>, bookings: Vec<u32>) -> HistoryWindow {
        let n = offers.len();
        let mut w = HistoryWindow::new(1, n);
        w.append(SellDateRecord::new(0, offers, bookings).unwrap()).unwrap();
        w
    }

    #[test]
    fn ll_empty_window_is_zero() {
        let s = ladder();
        let w = HistoryWindow::new(22, s.n());
        assert_eq!(log_likelihood(&w, 0.5, NU, &s).unwrap(), 0.0);
    }

    #[test]
    fn ll_base_fare_only_is_constant() {
        let s = ladder();
        let mut offers = vec![0u32; s.n()];
        offers[0] = 1;
        let w = one_record_window(offers, vec![0; s.n()]);
        let a = log_likelihood(&w, 0.3, NU, &s).unwrap();
        let b = log_likelihood(&w, 1.2, NU, &s).unwrap();
        assert_eq!(a, -NU);
        assert_eq!(b, -NU);
    }

    #[test]
    fn ll_single_booking_at_90() {
        let s = ladder();
        let mut offers = vec![0u32; s.n()];
        let mut bookings = vec![0u32; s.n()];
        offers[2] = 1;
        bookings[2] = 1;
        let w = one_record_window(offers, bookings);
        let ll = log_likelihood(&w, 0.693147, NU, &s).unwrap();
        let expect = -2.372_698_894_975_102_6;
        assert!((ll - expect).abs() < 1e-12, "ll={ll}");
    }

    #[test]
    fn ll_rejects_bad_inputs() {
        let s = ladder();
        let w = HistoryWindow::new(1, s.n());
        assert!(log_likelihood(&w, 0.0, NU, &s).is_err());
        assert!(log_likelihood(&w, 0.5, 0.0, &s).is_err());
        let short = HistoryWindow::new(1, 3);
        assert!(log_likelihood(&short, 0.5, NU, &s).is_err());
    }

    fn random_window(rng: &mut ChaCha8Rng, n_fares: usize, dates: usize) -> HistoryWindow {
        let mut w = HistoryWindow::new(dates, n_fares);
        for t in 0..dates as u64 {
            let offers: Vec<u32> = (0..n_fares).map(|_| rng.random_range(0..6)).collect();
            let bookings: Vec<u32> = offers
                .iter()
                .map(|&o| if o == 0 { 0 } else { rng.random_range(0..=o.min(2)) })
                .collect();
            w.append(SellDateRecord::new(t, offers, bookings).unwrap()).unwrap();
        }
        w
    }

    #[test]
    fn grad_matches_finite_differences() {
        let s = ladder();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let w = random_window(&mut rng, s.n(), 8);
            let phi = rng.random_range(0.25..1.3);
            let g = log_likelihood_grad(&w, phi, NU, &s).unwrap();
            let h = 1e-5 * phi;
            let fd = (log_likelihood(&w, phi + h, NU, &s).unwrap()
                - log_likelihood(&w, phi - h, NU, &s).unwrap())
                / (2.0 * h);
            let scale = g.abs().max(fd.abs()).max(1e-9);
            assert!((g - fd).abs() / scale < 1e-4, "g={g} fd={fd}");
        }
    }

    #[test]
    fn fisher_frozen_value_and_linearity() {
        let s = ladder();
        let mut offers = vec![0u32; s.n()];
        offers[2] = 1;
        let w = one_record_window(offers.clone(), vec![0; s.n()]);
        let i1 = fisher_information(&w, 0.693147, NU, &s, None).unwrap();
        assert!((i1 - 0.066_165_034_805_232_58).abs() < 1e-15, "i1={i1}");

        let mut doubled = offers;
        doubled[2] = 2;
        let w2 = one_record_window(doubled, vec![0; s.n()]);
        let i2 = fisher_information(&w2, 0.693147, NU, &s, None).unwrap();
        assert!((i2 - 2.0 * i1).abs() < 1e-15);
    }

    #[test]
    fn fisher_zero_at_base_fare_and_empty() {
        let s = ladder();
        let w = HistoryWindow::new(5, s.n());
        assert_eq!(fisher_information(&w, 0.5, NU, &s, None).unwrap(), 0.0);
        let mut offers = vec![0u32; s.n()];
        offers[0] = 7;
        let w = one_record_window(offers, vec![0; s.n()]);
        assert_eq!(fisher_information(&w, 0.5, NU, &s, None).unwrap(), 0.0);
    }

    #[test]
    fn fisher_extra_offers_additive() {
        let s = ladder();
        let mut offers = vec![0u32; s.n()];
        offers[3] = 4;
        let w = one_record_window(offers, vec![0; s.n()]);
        let empty = HistoryWindow::new(1, s.n());
        let extra: Vec<f64> = (0..s.n()).map(|i| 0.5 * i as f64).collect();
        let combined = fisher_information(&w, 0.4, NU, &s, Some(&extra)).unwrap();
        let base = fisher_information(&w, 0.4, NU, &s, None).unwrap();
        let extra_only = fisher_information(&empty, 0.4, NU, &s, Some(&extra)).unwrap();
        assert!((combined - (base + extra_only)).abs() < 1e-12);

        let mut neg = extra;
        neg[1] = -0.1;
        assert!(matches!(
            fisher_information(&w, 0.4, NU, &s, Some(&neg)),
            Err(Error::NegativeExpectedOffers(1))
        ));
    }

    #[test]
    fn sigma_bound_cases() {
        assert_eq!(sigma_bound(1.0).unwrap(), 1.0);
        assert_eq!(sigma_bound(4.0).unwrap(), 0.5);
        assert_eq!(sigma_bound(0.0).unwrap(), f64::INFINITY);
        assert!(sigma_bound(-1e-9).is_err());
    }

    #[test]
    fn estimate_clamps_high_phi_on_bookingless_window() {
        let s = ladder();
        let mut offers = vec![0u32; s.n()];
        offers[2] = 5;
        offers[7] = 3;
        let w = one_record_window(offers, vec![0; s.n()]);
        let r = estimate_phi(&w, NU, &s, Frat5Clamp::default()).unwrap();
        assert!(r.clamped);
        assert!(!r.degenerate);
        assert_eq!(r.frat5_hat, 1.5);
        assert!((r.phi_hat - 2.0 * std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn estimate_degenerate_paths() {
        let s = ladder();
        let empty = HistoryWindow::new(22, s.n());
        let r = estimate_phi(&empty, NU, &s, Frat5Clamp::default()).unwrap();
        assert!(r.degenerate);
        assert!(!r.clamped);
        assert_eq!(r.frat5_hat, 2.9);
        assert_eq!(r.fisher_info, 0.0);
        assert_eq!(r.sigma, f64::INFINITY);

        let mut offers = vec![0u32; s.n()];
        offers[0] = 9;
        let mut bookings = vec![0u32; s.n()];
        bookings[0] = 3;
        let w = one_record_window(offers, bookings);
        let r = estimate_phi(&w, NU, &s, Frat5Clamp::default()).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.frat5_hat, 2.9);
    }

    #[test]
    fn estimate_pinned_clamp_returns_bound() {
        let s = ladder();
        let mut offers = vec![0u32; s.n()];
        offers[4] = 3;
        let mut bookings = vec![0u32; s.n()];
        bookings[4] = 1;
        let w = one_record_window(offers, bookings);
        let clamp = Frat5Clamp::new(2.56, 2.56).unwrap();
        let r = estimate_phi(&w, NU, &s, clamp).unwrap();
        assert_eq!(r.frat5_hat, 2.56);
        assert!(r.clamped);
        assert!((r.phi_hat - 0.444_325_115_743_554_7).abs() < 1e-15);
    }

    /// Bookings rounded from their expectations keep the MLE within a few
    /// thousandths of the generating φ.
    #[test]
    fn estimate_recovers_phi_from_rounded_expectations() {
        let s = ladder();
        let params = DemandParams::from_phi(NU, 0.444_325).unwrap();
        let profile = crate::fares::demand_profile(&params, &s);
        let offers = vec![1000u32; s.n()];
        let bookings: Vec<u32> = profile.iter().map(|d| (1000.0 * d).round() as u32).collect();
        let w = one_record_window(offers, bookings);
        let r = estimate_phi(&w, NU, &s, Frat5Clamp::default()).unwrap();
        assert!(!r.clamped && !r.degenerate);
        assert!((r.phi_hat - 0.444_325).abs() < 5e-3, "phi_hat={}", r.phi_hat);
        assert!(r.sigma < 0.025);
    }

    #[test]
    fn estimate_recovers_phi_from_poisson_sample() {
        let s = ladder();
        let params = DemandParams::from_phi(NU, 0.444).unwrap();
        let profile = crate::fares::demand_profile(&params, &s);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let offers = vec![1000u32; s.n()];
        let bookings: Vec<u32> = profile
            .iter()
            .map(|&d| Poisson::new(1000.0 * d).unwrap().sample(&mut rng) as u32)
            .collect();
        let w = one_record_window(offers, bookings);
        let r = estimate_phi(&w, NU, &s, Frat5Clamp::default()).unwrap();
        assert!((r.phi_hat - 0.444).abs() < 0.02, "phi_hat={}", r.phi_hat);
    }

    /// MSE of φ̂ shrinks as the synthetic window grows.
    #[test]
    fn estimate_is_consistent_in_sample_size() {
        let s = ladder();
        let phi_true = 0.52;
        let params = DemandParams::from_phi(NU, phi_true).unwrap();
        let profile = crate::fares::demand_profile(&params, &s);
        let mut mses = Vec::new();
        for (case, per_fare) in [10u32, 100, 1000].into_iter().enumerate() {
            let mut sq = 0.0;
            let reps = 30;
            for rep in 0..reps {
                let mut rng = ChaCha8Rng::seed_from_u64(1000 * case as u64 + rep);
                let offers = vec![per_fare; s.n()];
                let bookings: Vec<u32> = profile
                    .iter()
                    .map(|&d| Poisson::new(per_fare as f64 * d).unwrap().sample(&mut rng) as u32)
                    .collect();
                let w = one_record_window(offers, bookings);
                let r = estimate_phi(&w, NU, &s, Frat5Clamp::default()).unwrap();
                sq += (r.phi_hat - phi_true).powi(2);
            }
            mses.push(sq / reps as f64);
        }
        assert!(mses[0] > mses[1] && mses[1] > mses[2], "mses={mses:?}");
    }

    /// The grid + golden-section solver lands on the same maximizer as a
    /// dense brute-force scan.
    #[test]
    fn estimate_matches_dense_grid() {
        let s = ladder();
        let clamp = Frat5Clamp::default();
        let (phi_lo, phi_hi) = clamp.phi_interval();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let mut w = random_window(&mut rng, s.n(), 6);
            if w.offer_totals(w.len()).unwrap()[1..].iter().all(|&o| o == 0) {
                let mut offers = vec![0u32; s.n()];
                offers[9] = 1;
                let t = w.newest_sell_date().map_or(0, |d| d + 1);
                w.append(SellDateRecord::new(t, offers, vec![0; s.n()]).unwrap()).unwrap();
            }
            let r = estimate_phi(&w, NU, &s, clamp).unwrap();
            let mut best = (f64::NEG_INFINITY, phi_lo);
            for k in 0..100_000 {
                let phi = phi_lo + (phi_hi - phi_lo) * k as f64 / 99_999.0;
                let v = log_likelihood(&w, phi, NU, &s).unwrap();
                if v > best.0 {
                    best = (v, phi);
                }
            }
            assert!(
                (r.phi_hat - best.1).abs() < 1e-4,
                "solver={} dense={}",
                r.phi_hat,
                best.1
            );
        }
    }

    #[test]
    fn clamp_validation() {
        assert!(Frat5Clamp::new(1.0, 4.3).is_err());
        assert!(Frat5Clamp::new(2.0, 1.9).is_err());
        assert!(Frat5Clamp::new(2.0, 2.0).is_ok());
        let c = Frat5Clamp::default();
        assert_eq!(c.midpoint(), 2.9);
        let (lo, hi) = c.phi_interval();
        assert!(lo < hi);
    }

    proptest! {
        // Estimates always stay inside the clamp interval, and sigma is
        // consistent with the reported information.
        #[test]
        fn estimate_within_clamp(seed in 0u64..500) {
            let s = ladder();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w = random_window(&mut rng, s.n(), 5);
            let clamp = Frat5Clamp::default();
            let (phi_lo, phi_hi) = clamp.phi_interval();
            let r = estimate_phi(&w, NU, &s, clamp).unwrap();
            prop_assert!(r.phi_hat >= phi_lo - 1e-12 && r.phi_hat <= phi_hi + 1e-12);
            prop_assert!(r.frat5_hat >= 1.5 - 1e-9 && r.frat5_hat <= 4.3 + 1e-9);
            if r.fisher_info > 0.0 {
                prop_assert!((r.sigma - 1.0 / r.fisher_info.sqrt()).abs() < 1e-12);
            } else {
                prop_assert!(r.sigma.is_infinite());
            }
        }
    }
}
