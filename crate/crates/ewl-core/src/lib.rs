//! Simulation and optimization library for single-leg airline pricing with
//! demand learning.
//!
//! The library models a market where a pricing system must simultaneously
//! earn revenue and learn the demand price sensitivity it needs for future
//! pricing. Its pieces:
//!
//! - [`fares`]: the discrete fare ladder and the negative exponential
//!   demand model.
//! - [`history`]: the rolling window of per-sell-date offer and booking
//!   counts.
//! - [`estimator`]: maximum-likelihood estimation of the price-sensitivity
//!   coefficient with Fisher information.
//! - [`policy`]: pricing policies over the ladder and the unified
//!   revenue/information objective with its simplex-constrained maximizer.
//! - [`simulator`]: seeded Poisson market episodes.
//! - [`harness`]: the η sweep, frat5 grid and detailed-view experiments.
//! - [`stats`]: confidence-interval helpers.
//!
//! Episodes are independent and deterministic given their seed; with the
//! default `parallel` feature the harness runs them on all cores without
//! changing any result.

pub mod error;
pub mod estimator;
pub mod fares;
pub mod harness;
pub mod history;
pub mod policy;
pub mod rng;
pub mod simulator;
pub mod stats;

pub use error::{Error, Result};
