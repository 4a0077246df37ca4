//! Residual life estimation toolkit.
//!
//! Estimates the remaining time to failure of machines and components from
//! reliability and condition-monitoring data. Two dataset shapes are
//! supported: a *renewal* system (fatigue test pieces restored to
//! good-as-new, measured on a fixed window grid) and a *repaired* system
//! (a pump fleet with sparse vibration readings and imperfect repair).
//!
//! The estimator families:
//!
//! - [`weibull`] — two-parameter Weibull fit of failure times; predicts the
//!   characteristic life for every unit (the classical baseline).
//! - [`mlp`] — single-hidden-layer perceptron trained by gradient descent
//!   with momentum, Levenberg-Marquardt, or Levenberg-Marquardt with
//!   Bayesian regularization.
//! - [`grnn`] — general regression neural network, a training-free kernel
//!   regressor.
//!
//! [`features`] builds network inputs from raw data, [`eval`] runs the
//! static-split and grouped cross-validation comparison protocols, and
//! [`sim`] generates seeded synthetic datasets calibrated to the fleet
//! statistics the real (unpublished) datasets are known to have.

pub mod dataset;
pub mod eval;
pub mod features;
pub mod grnn;
pub mod mlp;
pub mod model_io;
pub mod sim;
pub mod weibull;

mod error;
mod rng;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
