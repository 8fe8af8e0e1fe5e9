//! Demand-model primitives: the discrete fare ladder, the frat5 <-> phi
//! mapping, expected bookings per offer and the revenue-greedy fare.
//!
//! Demand follows the negative exponential model
//! `d(f) = nu * exp(-phi * (f/f0 - 1))`: every arriving customer books at the
//! base fare `f0`, and the booking probability halves at `f = frat5 * f0`.

use crate::error::{Error, Result};

pub const LN_2: f64 = std::f64::consts::LN_2;

/// Ordered ladder of offerable prices. Fares are exact integer cents;
/// price ratios `f/f0` are computed in floating point on demand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FareStructure {
    fares_cents: Vec<i64>,
}

impl FareStructure {
    /// Build a ladder from strictly increasing positive fares in cents.
    pub fn new(fares_cents: Vec<i64>) -> Result<Self> {
        if fares_cents.len() < 2 {
            return Err(Error::InvalidFareLadder(format!(
                "need at least 2 price points, got {}",
                fares_cents.len()
            )));
        }
        if fares_cents[0] <= 0 {
            return Err(Error::InvalidFareLadder(format!(
                "base fare must be positive, got {} cents",
                fares_cents[0]
            )));
        }
        if fares_cents.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidFareLadder(
                "fares must be strictly increasing".to_string(),
            ));
        }
        Ok(Self { fares_cents })
    }

    /// Build a ladder from dollar amounts, rounding to whole cents.
    pub fn from_dollars(dollars: &[f64]) -> Result<Self> {
        let cents = dollars
            .iter()
            .map(|d| {
                if !d.is_finite() {
                    Err(Error::InvalidFareLadder(format!("non-finite fare {d}")))
                } else {
                    Ok((d * 100.0).round() as i64)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(cents)
    }

    /// The ten-point ladder $50, $70, ..., $230.
    pub fn default_ladder() -> Self {
        Self::new((0..10).map(|i| 5000 + 2000 * i).collect()).expect("valid default ladder")
    }

    pub fn n(&self) -> usize {
        self.fares_cents.len()
    }

    pub fn base_fare_cents(&self) -> i64 {
        self.fares_cents[0]
    }

    pub fn fares_cents(&self) -> &[i64] {
        &self.fares_cents
    }

    pub fn fare_cents(&self, index: usize) -> Result<i64> {
        self.fares_cents
            .get(index)
            .copied()
            .ok_or(Error::FareIndexOutOfRange {
                index,
                n: self.n(),
            })
    }

    pub fn fare_dollars(&self, index: usize) -> Result<f64> {
        Ok(self.fare_cents(index)? as f64 / 100.0)
    }

    /// Price ratio `f_i / f0`.
    pub fn ratio(&self, index: usize) -> Result<f64> {
        Ok(self.fare_cents(index)? as f64 / self.fares_cents[0] as f64)
    }

    /// Ladder index of a fare given in cents.
    pub fn index_of_cents(&self, cents: i64) -> Result<usize> {
        self.fares_cents
            .binary_search(&cents)
            .map_err(|_| Error::FareNotOnLadder(cents))
    }
}

/// Demand parameters: Poisson arrival rate per flight per sell date and the
/// price-sensitivity coefficient, carried in both phi and frat5 form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemandParams {
    nu: f64,
    phi: f64,
    frat5: f64,
}

impl DemandParams {
    pub fn from_frat5(nu: f64, frat5: f64) -> Result<Self> {
        check_nu(nu)?;
        let phi = phi_from_frat5(frat5)?;
        Ok(Self { nu, phi, frat5 })
    }

    pub fn from_phi(nu: f64, phi: f64) -> Result<Self> {
        check_nu(nu)?;
        let frat5 = frat5_from_phi(phi)?;
        Ok(Self { nu, phi, frat5 })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn frat5(&self) -> f64 {
        self.frat5
    }
}

fn check_nu(nu: f64) -> Result<()> {
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(Error::InvalidArrivalRate(nu));
    }
    Ok(())
}

/// Map frat5 to the price-sensitivity coefficient: `phi = ln(2) / (frat5 - 1)`.
pub fn phi_from_frat5(frat5: f64) -> Result<f64> {
    if !(frat5 > 1.0) || !frat5.is_finite() {
        return Err(Error::InvalidFrat5(frat5));
    }
    Ok(LN_2 / (frat5 - 1.0))
}

/// Inverse mapping: `frat5 = 1 + ln(2) / phi`.
pub fn frat5_from_phi(phi: f64) -> Result<f64> {
    if !(phi > 0.0) || !phi.is_finite() {
        return Err(Error::InvalidPhi(phi));
    }
    Ok(1.0 + LN_2 / phi)
}

/// Expected bookings per offer at the given price ratio. No ladder check;
/// hot-path helper for callers that already hold a valid index.
#[inline]
pub(crate) fn demand_at_ratio(ratio: f64, nu: f64, phi: f64) -> f64 {
    nu * (-phi * (ratio - 1.0)).exp()
}

/// Expected bookings `d(f) = nu * exp(-phi * (f/f0 - 1))` for a ladder fare.
pub fn expected_bookings(fare_cents: i64, params: &DemandParams, structure: &FareStructure) -> Result<f64> {
    let index = structure.index_of_cents(fare_cents)?;
    let ratio = structure.ratio(index)?;
    Ok(demand_at_ratio(ratio, params.nu(), params.phi()))
}

/// Expected revenue per offer, `R(f) = f * d(f)`, in dollars.
pub fn expected_revenue_per_offer(
    fare_cents: i64,
    params: &DemandParams,
    structure: &FareStructure,
) -> Result<f64> {
    let d = expected_bookings(fare_cents, params, structure)?;
    Ok(fare_cents as f64 / 100.0 * d)
}

/// Expected bookings per offer for every ladder fare.
pub fn demand_profile(params: &DemandParams, structure: &FareStructure) -> Vec<f64> {
    let f0 = structure.base_fare_cents() as f64;
    structure
        .fares_cents()
        .iter()
        .map(|&f| demand_at_ratio(f as f64 / f0, params.nu(), params.phi()))
        .collect()
}

/// Ladder index maximizing expected revenue per offer. Ties break toward the
/// lower fare.
pub fn greedy_fare(params: &DemandParams, structure: &FareStructure) -> usize {
    let f0 = structure.base_fare_cents() as f64;
    let mut best = 0usize;
    let mut best_rev = f64::NEG_INFINITY;
    for (i, &f) in structure.fares_cents().iter().enumerate() {
        let dollars = f as f64 / 100.0;
        let rev = dollars * demand_at_ratio(f as f64 / f0, params.nu(), params.phi());
        if rev > best_rev {
            best = i;
            best_rev = rev;
        }
    }
    best
}
