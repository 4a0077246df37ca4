//! Renewal (fatigue test) dataset generator.

use rand::Rng;

use super::{jitter, RenewalSimConfig};
use crate::dataset::{MeasurementWindow, RenewalRun, WINDOW_SPACING_S};
use crate::rng::stream;
use crate::Result;

/// Generates one fatigue run per configured slot.
///
/// Per run: the applied load range is assigned round-robin from
/// `load_range_choices` and the life is drawn from the load-scaled Weibull
/// ground truth. Windows land every 180 s until the life is exhausted.
/// The load channels hold steady until crack onset and then droop (the
/// actuator is displacement-controlled, so a weakening test piece takes
/// less force); the temperature is flat until onset and then rises at a
/// rate that grows with the applied load. The recorded failure time is
/// the first grid point at or after the drawn life — the measurement
/// cadence makes finer resolution unobservable.
pub fn simulate_renewal(cfg: &RenewalSimConfig) -> Result<Vec<RenewalRun>> {
    cfg.validate()?;
    let s_ref = cfg.load_range_choices[0];
    let mut runs = Vec::with_capacity(cfg.n_runs);

    for i in 0..cfg.n_runs {
        let mut rng = stream(cfg.seed, i as u64);
        let load_range = cfg.load_range_choices[i % cfg.load_range_choices.len()];
        let eta = cfg.weibull_eta_ref * (s_ref / load_range).powf(cfg.load_life_exponent);

        let u: f64 = rng.random();
        let life = (eta * (-(1.0 - u).ln()).powf(1.0 / cfg.weibull_beta)).max(1.0);

        // Stratified mean-load factors keep same-load runs apart in the
        // covariate space while still varying the operating conditions.
        let mean_factor = 0.7 + 0.2 * (i as f64 + 0.5) / cfg.n_runs as f64
            + rng.random_range(-0.005..=0.005);
        let load_mean = mean_factor * load_range;
        let ambient = 21.0 + rng.random_range(-2.0..=2.0);

        let onset = cfg.crack_onset_fraction * life;
        let rise_rate = cfg.temp_rise_rate * (load_range / s_ref);

        let mut windows = Vec::new();
        let mut t = 0.0;
        while t < life {
            let past_onset = (t - onset).max(0.0);
            let range_det = (load_range - cfg.droop_rate * past_onset).max(0.0);
            let mean_det = load_mean * (range_det / load_range);
            windows.push(MeasurementWindow {
                elapsed_s: t,
                load_mean_kn: (mean_det + jitter(&mut rng, cfg.load_noise_sd)).max(0.0),
                load_range_kn: (range_det + jitter(&mut rng, cfg.load_noise_sd)).max(0.0),
                temperature_c: ambient + rise_rate * past_onset + jitter(&mut rng, cfg.temp_noise_sd),
            });
            t += WINDOW_SPACING_S;
        }

        let failure_time_s = (life / WINDOW_SPACING_S).ceil() * WINDOW_SPACING_S;
        runs.push(RenewalRun::new(format!("run{i:02}"), windows, failure_time_s)?);
    }
    Ok(runs)
}
