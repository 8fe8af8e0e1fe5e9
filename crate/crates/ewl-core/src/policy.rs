//! Policy-level revenue, information, and the unified objective, plus its
//! maximization over the probability simplex.
//!
//! A pricing policy is a multinomial distribution over the fare ladder: on a
//! sell date, fare i is offered to every active flight with probability π_i.
//! The unified objective trades expected revenue against estimator
//! uncertainty: U(π) = R(π) − η/(φ̂·√I(π)).

use crate::error::{Error, Result};
use crate::fares::{demand_profile, greedy_fare, DemandParams, FareStructure};
use crate::history::HistoryWindow;

/// Floor on I(π) inside the objective. Keeps U finite at zero-information
/// points; such points are never maximizers for finite η.
pub const INFO_FLOOR: f64 = 1e-12;

const KKT_TOL: f64 = 1e-6;
const MAX_ITERS: usize = 500;
const ARMIJO_C: f64 = 1e-4;

/// Probability distribution over the fare ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct PricingPolicy {
    probs: Vec<f64>,
}

impl PricingPolicy {
    /// Nonnegative weights with positive sum; renormalized to sum exactly 1.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::InvalidPolicy("policy needs at least two fares".into()));
        }
        let mut sum = 0.0;
        for &p in &probs {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidPolicy(format!("invalid probability {p}")));
            }
            sum += p;
        }
        if !(sum > 0.0) {
            return Err(Error::InvalidPolicy("probabilities sum to zero".into()));
        }
        let mut probs = probs;
        for p in &mut probs {
            *p /= sum;
        }
        Ok(Self { probs })
    }

    pub fn point_mass(index: usize, n: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::FareIndexOutOfRange { index, n });
        }
        let mut probs = vec![0.0; n];
        probs[index] = 1.0;
        Self::new(probs)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    pub fn n(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Total-variation distance, ½ Σ |π_i − ρ_i|.
    pub fn tv_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.n(), other.n(), "policy lengths differ");
        0.5 * self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }
}

/// Everything the objective needs for one sell date, with per-fare demand,
/// revenue, and information weights precomputed at the current estimate.
/// The history window enters through its newest H−1 records, the offers
/// already observed; the current date contributes the expected H·π_i.
#[derive(Debug, Clone)]
pub struct ObjectiveContext {
    structure: FareStructure,
    phi_hat: f64,
    nu: f64,
    horizon: usize,
    eta: f64,
    /// H·f_i·d(f_i), expected revenue per unit of π_i.
    rev: Vec<f64>,
    /// d(f_i)·(f_i/f0 − 1)², information per offer at fare i.
    info_w: Vec<f64>,
    /// Information carried by the newest H−1 window records.
    base_info: f64,
    greedy_index: usize,
}

impl ObjectiveContext {
    pub fn new(
        window: &HistoryWindow,
        phi_hat: f64,
        nu: f64,
        horizon: usize,
        eta: f64,
        structure: &FareStructure,
    ) -> Result<Self> {
        if horizon < 1 {
            return Err(Error::InvalidContext("horizon must be at least 1".into()));
        }
        if !eta.is_finite() || eta < 0.0 {
            return Err(Error::InvalidContext(format!("eta must be >= 0, got {eta}")));
        }
        if window.n_fares() != structure.n() {
            return Err(Error::FareCountMismatch {
                got: window.n_fares(),
                expected: structure.n(),
            });
        }
        let params = DemandParams::from_phi(nu, phi_hat)?;
        let demand = demand_profile(&params, structure);
        let h = horizon as f64;
        let mut rev = Vec::with_capacity(structure.n());
        let mut info_w = Vec::with_capacity(structure.n());
        for (i, &d) in demand.iter().enumerate() {
            let f = structure.fare_dollars(i)?;
            let s = structure.ratio(i)? - 1.0;
            rev.push(h * f * d);
            info_w.push(d * s * s);
        }
        let observed = window.len().min(horizon.saturating_sub(1));
        let offers = window.offer_totals(observed)?;
        let base_info: f64 = offers
            .iter()
            .zip(&info_w)
            .map(|(&o, &w)| o as f64 * w)
            .sum();
        let greedy_index = greedy_fare(&params, structure);
        Ok(Self {
            structure: structure.clone(),
            phi_hat,
            nu,
            horizon,
            eta,
            rev,
            info_w,
            base_info,
            greedy_index,
        })
    }

    pub fn n(&self) -> usize {
        self.rev.len()
    }

    pub fn structure(&self) -> &FareStructure {
        &self.structure
    }

    pub fn phi_hat(&self) -> f64 {
        self.phi_hat
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    fn check(&self, pi: &PricingPolicy) -> Result<()> {
        if pi.n() != self.n() {
            return Err(Error::FareCountMismatch {
                got: pi.n(),
                expected: self.n(),
            });
        }
        Ok(())
    }

    fn revenue_raw(&self, probs: &[f64]) -> f64 {
        dot(&self.rev, probs)
    }

    fn info_raw(&self, probs: &[f64]) -> f64 {
        self.base_info + self.horizon as f64 * dot(&self.info_w, probs)
    }

    fn unified_raw(&self, probs: &[f64]) -> f64 {
        let r = self.revenue_raw(probs);
        if self.eta == 0.0 {
            return r;
        }
        r - self.eta / (self.phi_hat * self.info_raw(probs).max(INFO_FLOOR).sqrt())
    }

    fn grad_raw(&self, probs: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.rev);
        if self.eta == 0.0 {
            return;
        }
        let info = self.info_raw(probs);
        if info > INFO_FLOOR {
            let c = self.eta * self.horizon as f64 / (2.0 * self.phi_hat * info * info.sqrt());
            for (g, &w) in out.iter_mut().zip(&self.info_w) {
                *g += c * w;
            }
        }
    }
}

/// Expected revenue over the horizon: R(π) = H·Σ f_i·π_i·d(f_i).
pub fn policy_revenue(pi: &PricingPolicy, ctx: &ObjectiveContext) -> Result<f64> {
    ctx.check(pi)?;
    Ok(ctx.revenue_raw(pi.probs()))
}

/// Policy-level information: offers already in the window plus the expected
/// H·π_i offers of the current date, each weighted by d(f_i)·(f_i/f0 − 1)².
pub fn policy_fisher_information(pi: &PricingPolicy, ctx: &ObjectiveContext) -> Result<f64> {
    ctx.check(pi)?;
    Ok(ctx.info_raw(pi.probs()))
}

/// U(π) = R(π) − η/(φ̂·√max(I(π), floor)).
pub fn unified_objective(pi: &PricingPolicy, ctx: &ObjectiveContext) -> Result<f64> {
    ctx.check(pi)?;
    Ok(ctx.unified_raw(pi.probs()))
}

/// Coordinate-wise ∂U/∂π_i. The penalty contributes only above the
/// information floor.
pub fn unified_gradient(pi: &PricingPolicy, ctx: &ObjectiveContext) -> Result<Vec<f64>> {
    ctx.check(pi)?;
    let mut g = vec![0.0; ctx.n()];
    ctx.grad_raw(pi.probs(), &mut g);
    Ok(g)
}

/// Point mass at the revenue-maximizing fare for the current estimate.
pub fn greedy_policy(ctx: &ObjectiveContext) -> PricingPolicy {
    PricingPolicy::point_mass(ctx.greedy_index, ctx.n()).expect("index from context")
}

/// Uniform distribution over the ladder.
pub fn random_policy(structure: &FareStructure) -> PricingPolicy {
    PricingPolicy::uniform(structure.n()).expect("ladder has at least two fares")
}

/// Result of [`maximize_unified`]. `converged` reports whether the run that
/// produced the returned policy met the first-order tolerance; on false the
/// policy is the best iterate found.
#[derive(Debug, Clone)]
pub struct MaximizeResult {
    pub policy: PricingPolicy,
    pub value: f64,
    pub converged: bool,
}

/// Maximizes U over the simplex by projected-gradient ascent with Armijo
/// backtracking, started from every vertex and from the uniform policy.
///
/// Convergence is declared on the linearized optimality gap
/// max_i ∇U_i − ⟨∇U, π⟩, which upper-bounds the true suboptimality for the
/// concave U and is exactly zero at an optimal vertex.
pub fn maximize_unified(ctx: &ObjectiveContext) -> MaximizeResult {
    let n = ctx.n();
    let mut best: Option<(f64, Vec<f64>, bool)> = None;
    let mut start = vec![0.0; n];
    for s in 0..=n {
        for x in start.iter_mut() {
            *x = 0.0;
        }
        if s < n {
            start[s] = 1.0;
        } else {
            start.iter_mut().for_each(|x| *x = 1.0 / n as f64);
        }
        let (probs, value, converged) = ascend(ctx, start.clone());
        if best.as_ref().map_or(true, |(bv, _, _)| value > *bv) {
            best = Some((value, probs, converged));
        }
    }
    let (value, probs, converged) = best.expect("at least one start");
    MaximizeResult {
        policy: PricingPolicy::new(probs).expect("projection keeps the simplex"),
        value,
        converged,
    }
}

fn ascend(ctx: &ObjectiveContext, mut x: Vec<f64>) -> (Vec<f64>, f64, bool) {
    let n = x.len();
    let mut g = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut alpha = 1.0f64;
    let mut converged = false;
    for _ in 0..MAX_ITERS {
        ctx.grad_raw(&x, &mut g);
        let gap = g.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)) - dot(&g, &x);
        if gap < KKT_TOL {
            converged = true;
            break;
        }
        let ux = ctx.unified_raw(&x);
        alpha = (alpha * 2.0).min(1e8);
        let mut stepped = false;
        while alpha > 1e-30 {
            for (t, (&xi, &gi)) in trial.iter_mut().zip(x.iter().zip(&g)) {
                *t = xi + alpha * gi;
            }
            project_simplex(&mut trial);
            let ascent: f64 = trial
                .iter()
                .zip(&x)
                .zip(&g)
                .map(|((&t, &xi), &gi)| gi * (t - xi))
                .sum();
            if ascent <= 0.0 {
                break;
            }
            if ctx.unified_raw(&trial) >= ux + ARMIJO_C * ascent {
                x.copy_from_slice(&trial);
                stepped = true;
                break;
            }
            alpha *= 0.5;
        }
        if !stepped {
            ctx.grad_raw(&x, &mut g);
            let gap = g.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)) - dot(&g, &x);
            converged = gap < KKT_TOL;
            break;
        }
    }
    let value = ctx.unified_raw(&x);
    (x, value, converged)
}

/// Euclidean projection onto the probability simplex (sort-based).
pub fn project_simplex(v: &mut [f64]) {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).expect("no NaN in projection input"));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cumulative += uk;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if uk - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
