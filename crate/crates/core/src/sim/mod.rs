//! Seeded synthetic data generators.
//!
//! The lab and pump fleet datasets behind the published statistics are not
//! available, so these generators stand in for them. Each is calibrated to
//! the known fleet-level numbers: the renewal generator draws lives from a
//! Weibull ground truth scaled by an inverse power law of the applied load
//! range, and the pump generator reproduces the two subpopulations (long
//! first lives with one or two interventions versus short first lives with
//! about four) and the collapse of reliability after the first repair.
//!
//! Generation is deterministic: all draws flow from one counter-based
//! seeded generator, with an independent substream per run or pump, and
//! the draw order is part of the output contract. Sensor noise is bounded
//! uniform jitter on `±1.5 * sd`, so pre-onset condition deltas stay
//! within `3 * sd` by construction rather than by luck.

mod pumps;
mod renewal;

pub use pumps::simulate_pumps;
pub use renewal::simulate_renewal;

use crate::{Error, Result};

/// Configuration of the renewal (fatigue test) generator.
///
/// The first entry of `load_range_choices` is the reference load range: a
/// run at that load draws its life from `Weibull(weibull_beta,
/// weibull_eta_ref)`, and other loads scale the characteristic life by
/// `(S_ref / S)^load_life_exponent`.
#[derive(Debug, Clone, PartialEq)]
pub struct RenewalSimConfig {
    pub n_runs: usize,
    pub weibull_beta: f64,
    /// Characteristic life in seconds at the reference load range.
    pub weibull_eta_ref: f64,
    /// Applied load ranges in kN, assigned to runs round-robin.
    pub load_range_choices: Vec<f64>,
    /// Inverse power-law exponent of the load-life relation.
    pub load_life_exponent: f64,
    /// Fraction of the drawn life after which crack growth shows in the
    /// measured channels.
    pub crack_onset_fraction: f64,
    /// Load-range decay after crack onset, kN per second.
    pub droop_rate: f64,
    /// Temperature rise after crack onset at the reference load, degrees
    /// Celsius per second; scales with the applied load.
    pub temp_rise_rate: f64,
    /// Jitter scale of the load channels, kN.
    pub load_noise_sd: f64,
    /// Jitter scale of the temperature channel, degrees Celsius.
    pub temp_noise_sd: f64,
    pub seed: u64,
}

impl Default for RenewalSimConfig {
    fn default() -> Self {
        Self {
            n_runs: 12,
            weibull_beta: 1.7522,
            weibull_eta_ref: 8971.0,
            load_range_choices: vec![300.0, 330.0, 360.0],
            load_life_exponent: 3.0,
            crack_onset_fraction: 0.8,
            droop_rate: 0.02,
            temp_rise_rate: 0.02,
            load_noise_sd: 0.5,
            temp_noise_sd: 0.3,
            seed: 0,
        }
    }
}

impl RenewalSimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_runs == 0 {
            return Err(Error::config("n_runs must be at least 1"));
        }
        for (name, v) in [
            ("weibull_beta", self.weibull_beta),
            ("weibull_eta_ref", self.weibull_eta_ref),
            ("load_life_exponent", self.load_life_exponent),
            ("droop_rate", self.droop_rate),
            ("temp_rise_rate", self.temp_rise_rate),
            ("load_noise_sd", self.load_noise_sd),
            ("temp_noise_sd", self.temp_noise_sd),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(0.0..1.0).contains(&self.crack_onset_fraction) || self.crack_onset_fraction == 0.0 {
            return Err(Error::config(format!(
                "crack_onset_fraction must lie in (0, 1), got {}",
                self.crack_onset_fraction
            )));
        }
        if self.load_range_choices.is_empty()
            || self.load_range_choices.iter().any(|&s| !(s > 0.0) || !s.is_finite())
        {
            return Err(Error::config(
                "load_range_choices needs at least one positive load range",
            ));
        }
        Ok(())
    }
}

/// Monitored frequency band of the pump vibration spectra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandChoice {
    /// 0.4 x RPM
    X04,
    /// 1 x RPM
    X1,
    /// 2 x RPM
    X2,
    /// 5 x RPM
    X5,
}

impl BandChoice {
    pub fn label(&self) -> &'static str {
        match self {
            BandChoice::X04 => "0.4x",
            BandChoice::X1 => "1x",
            BandChoice::X2 => "2x",
            BandChoice::X5 => "5x",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "0.4x" => Ok(BandChoice::X04),
            "1x" => Ok(BandChoice::X1),
            "2x" => Ok(BandChoice::X2),
            "5x" => Ok(BandChoice::X5),
            other => Err(Error::config(format!(
                "band choice must be one of 0.4x, 1x, 2x, 5x; got {other:?}"
            ))),
        }
    }

    /// Relative amplitude of the chosen band.
    pub(crate) fn multiplier(&self) -> f64 {
        match self {
            BandChoice::X04 => 0.6,
            BandChoice::X1 => 1.0,
            BandChoice::X2 => 1.5,
            BandChoice::X5 => 2.4,
        }
    }
}

/// Configuration of the pump fleet generator.
#[derive(Debug, Clone, PartialEq)]
pub struct PumpSimConfig {
    pub n_pumps: usize,
    pub horizon_days: f64,
    /// Share of pumps in the long-lived subpopulation.
    pub strong_fraction: f64,
    /// Mean and uniform half-width of strong pumps' first lives, days.
    pub strong_first_life_mean: f64,
    pub strong_first_life_spread: f64,
    /// Mean and uniform half-width of weak pumps' first lives, days.
    pub weak_first_life_mean: f64,
    pub weak_first_life_spread: f64,
    /// Multiplier taking a pump's first-life mean to the mean of its
    /// post-repair lives (imperfect repair).
    pub repair_degradation: f64,
    /// Fractional uniform half-width of post-repair lives.
    pub subsequent_life_spread: f64,
    /// Healthy band-average amplitude before the band multiplier.
    pub band_baseline: f64,
    /// Fractional band-average rise approaching failure.
    pub band_escalation: f64,
    pub band_choice: BandChoice,
    /// Mean gap between routine mid-interval measurements, days.
    pub measurement_gap_days: f64,
    /// Probability that a deteriorating interval is suspended shortly
    /// before its drawn failure day.
    pub suspension_prob: f64,
    /// Probability of a sudden failure with no band escalation and no
    /// prompted final measurement.
    pub sudden_prob: f64,
    pub seed: u64,
}

impl Default for PumpSimConfig {
    fn default() -> Self {
        Self {
            n_pumps: 8,
            horizon_days: 791.0,
            strong_fraction: 0.625,
            strong_first_life_mean: 536.0,
            strong_first_life_spread: 31.0,
            weak_first_life_mean: 357.0,
            weak_first_life_spread: 72.0,
            repair_degradation: 0.32,
            subsequent_life_spread: 0.2,
            band_baseline: 2.0,
            band_escalation: 2.5,
            band_choice: BandChoice::X1,
            measurement_gap_days: 450.0,
            suspension_prob: 0.25,
            sudden_prob: 0.08,
            seed: 0,
        }
    }
}

impl PumpSimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_pumps == 0 {
            return Err(Error::config("n_pumps must be at least 1"));
        }
        if !(self.horizon_days > 0.0) {
            return Err(Error::config(format!(
                "horizon_days must be positive, got {}",
                self.horizon_days
            )));
        }
        for (name, v) in [
            ("strong_fraction", self.strong_fraction),
            ("suspension_prob", self.suspension_prob),
            ("sudden_prob", self.sudden_prob),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::config(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        for (name, v) in [
            ("strong_first_life_mean", self.strong_first_life_mean),
            ("weak_first_life_mean", self.weak_first_life_mean),
            ("repair_degradation", self.repair_degradation),
            ("band_baseline", self.band_baseline),
            ("measurement_gap_days", self.measurement_gap_days),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::config(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [
            ("strong_first_life_spread", self.strong_first_life_spread),
            ("weak_first_life_spread", self.weak_first_life_spread),
            ("subsequent_life_spread", self.subsequent_life_spread),
            ("band_escalation", self.band_escalation),
        ] {
            if v < 0.0 || !v.is_finite() {
                return Err(Error::config(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        if self.strong_first_life_spread >= self.strong_first_life_mean
            || self.weak_first_life_spread >= self.weak_first_life_mean
            || self.subsequent_life_spread >= 1.0
        {
            return Err(Error::config("life spreads must stay below their means"));
        }
        Ok(())
    }
}

/// Bounded sensor jitter: uniform on `±1.5 * sd`.
pub(crate) fn jitter(rng: &mut rand_chacha::ChaCha8Rng, sd: f64) -> f64 {
    use rand::Rng;
    rng.random_range(-1.5 * sd..=1.5 * sd)
}
