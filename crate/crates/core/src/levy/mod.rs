//! Calibration of the jump density of an exponential Lévy model from noisy
//! option prices by spectral cut-off, with the cut-off frequency chosen by
//! the same rules as in the sequence-space model.

pub mod calibration;
pub mod experiment;
pub mod grid;
pub mod merton;

pub use calibration::{
    backward_transform, cutoff_density_estimate, empirical_transform, l2_error, price_curve, simulate_observations,
    true_density, DensityEstimate, Design, ObservationSet, PriceCurve, Pricer,
};
pub use experiment::{run_levy_experiment, LevyConfig, LevyExperiment, LevyOutcome, PriceSource, VarianceProfile};
pub use grid::{GridSpec, SpectralGrid};
pub use merton::MertonModel;
