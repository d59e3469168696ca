//! Regularization parameter choice without knowledge of the noise level.
//!
//! The crate covers three layers:
//!
//! * [`model`]: the Gaussian sequence-space model, spectral cut-off
//!   estimators on a subsampled level schedule, and the variance and bias
//!   profiles `s(n)`, `b(n)`.
//! * [`selection`]: quasi-optimality, Lepski-type balancing and hardened
//!   balancing, together with oracle and efficiency bookkeeping.
//! * [`theory`]: the constants and probability bounds of the average-case
//!   analysis, and Monte Carlo risk estimators to check them against.
//!
//! [`levy`] applies the same rules to the calibration of the jump density
//! of an exponential Lévy (Merton) model from noisy option prices.

// `!(x < y)` is used deliberately so NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod levy;
pub mod model;
pub mod rng;
pub mod selection;
pub mod theory;

pub use error::{Error, Result};
pub use model::{Profiles, SimulationDraw, SpectralProblem, Subsampling, Weight};
pub use selection::{EfficiencyHistogram, LepskiDenominator, Method, SelectionReport};
