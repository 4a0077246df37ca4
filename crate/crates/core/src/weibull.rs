//! Two-parameter Weibull baseline: maximum-likelihood fitting and
//! characteristic-life prediction.
//!
//! The classical way to analyse renewal failure data is to fit a lifetime
//! distribution and predict the characteristic life for every unit. This
//! module provides that comparator: no covariates, one number for the
//! whole population.

use crate::{Error, Result};

/// Convergence threshold on successive shape iterates.
const BETA_TOL: f64 = 1e-10;

/// Fitted two-parameter Weibull distribution.
///
/// `beta` is the dimensionless shape, `eta` the scale (characteristic
/// life, same units as the input times). By definition `cdf(eta)` equals
/// `1 - exp(-1)`: 63.2% of the population fails before `eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeibullModel {
    pub beta: f64,
    pub eta: f64,
}

impl WeibullModel {
    pub fn new(beta: f64, eta: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::config(format!("Weibull shape must be positive, got {beta}")));
        }
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::config(format!("Weibull scale must be positive, got {eta}")));
        }
        Ok(Self { beta, eta })
    }

    /// Cumulative failure probability `F(t) = 1 - exp(-(t/eta)^beta)`.
    pub fn cdf(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::NegativeDuration { value: t });
        }
        Ok(1.0 - (-(t / self.eta).powf(self.beta)).exp())
    }

    /// Inverse CDF; `p` in `[0, 1)`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::config(format!("quantile probability must be in [0,1), got {p}")));
        }
        Ok(self.eta * (-(1.0 - p).ln()).powf(1.0 / self.beta))
    }

    /// Baseline residual-life prediction: every unit is assumed to live to
    /// the characteristic life, floored at zero once `elapsed` passes it.
    pub fn baseline_residual(&self, elapsed: f64) -> Result<f64> {
        if elapsed < 0.0 {
            return Err(Error::NegativeDuration { value: elapsed });
        }
        Ok((self.eta - elapsed).max(0.0))
    }

    /// Log-likelihood of complete failure times under this model.
    pub fn log_likelihood(&self, times: &[f64]) -> f64 {
        let n = times.len() as f64;
        let (b, e) = (self.beta, self.eta);
        let mut ll = n * (b.ln() - b * e.ln());
        for &t in times {
            ll += (b - 1.0) * t.ln() - (t / e).powf(b);
        }
        ll
    }
}

/// Fits a two-parameter Weibull to complete failure times by maximum
/// likelihood.
///
/// The shape solves the one-dimensional profile-likelihood equation
/// (bracketing bisection, then Newton polish to `1e-10`); the scale then
/// follows in closed form. Times are centred on their log mean internally,
/// which makes the solve invariant to the time unit.
pub fn fit_weibull_mle(failure_times: &[f64]) -> Result<WeibullModel> {
    let n = failure_times.len();
    if n < 3 {
        return Err(Error::TooFewSamples { need: 3, got: n });
    }
    for (i, &t) in failure_times.iter().enumerate() {
        if !t.is_finite() || t <= 0.0 {
            return Err(Error::NonPositiveDuration { index: i, value: t });
        }
    }
    let lo = failure_times.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = failure_times.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return Err(Error::DegenerateSample { n, value: lo });
    }

    let n_f = n as f64;
    let ln_t: Vec<f64> = failure_times.iter().map(|t| t.ln()).collect();
    let mean_ln = ln_t.iter().sum::<f64>() / n_f;
    // Centred logs: sum(s) == 0, so the profile equation only involves the
    // exp-weighted mean of s.
    let s: Vec<f64> = ln_t.iter().map(|l| l - mean_ln).collect();

    // f(beta) = n/beta - n * sum(w_i s_i) / sum(w_i), w_i = exp(beta s_i).
    // Strictly decreasing from +inf; the root is the MLE shape.
    let weighted = |beta: f64| -> (f64, f64) {
        let shift = s.iter().map(|&si| beta * si).fold(f64::NEG_INFINITY, f64::max);
        let (mut w_sum, mut ws_sum, mut wss_sum) = (0.0, 0.0, 0.0);
        for &si in &s {
            let w = (beta * si - shift).exp();
            w_sum += w;
            ws_sum += w * si;
            wss_sum += w * si * si;
        }
        let mean = ws_sum / w_sum;
        let var = (wss_sum / w_sum - mean * mean).max(0.0);
        (mean, var)
    };
    let profile = |beta: f64| -> f64 {
        let (mean, _) = weighted(beta);
        n_f / beta - n_f * mean
    };

    let mut b_lo = 1e-8;
    let mut b_hi = 1.0;
    while profile(b_hi) > 0.0 {
        b_hi *= 2.0;
        if b_hi > 1e8 {
            return Err(Error::DegenerateSample { n, value: lo });
        }
    }
    while b_hi - b_lo > 1e-6 * b_hi {
        let mid = 0.5 * (b_lo + b_hi);
        if profile(mid) > 0.0 {
            b_lo = mid;
        } else {
            b_hi = mid;
        }
    }

    // Newton polish: f'(beta) = -n/beta^2 - n * Var_w(s).
    let mut beta = 0.5 * (b_lo + b_hi);
    for _ in 0..100 {
        let (mean, var) = weighted(beta);
        let f = n_f / beta - n_f * mean;
        let fp = -n_f / (beta * beta) - n_f * var;
        let step = f / fp;
        beta -= step;
        if !(beta > 0.0) {
            beta = 0.5 * (b_lo + b_hi);
            break;
        }
        if step.abs() < BETA_TOL * beta.max(1.0) {
            break;
        }
    }

    // eta = c * (mean of exp(beta*s))^(1/beta) with c the geometric mean.
    let shift = s.iter().map(|&si| beta * si).fold(f64::NEG_INFINITY, f64::max);
    let w_sum: f64 = s.iter().map(|&si| (beta * si - shift).exp()).sum();
    let eta = mean_ln.exp() * (((w_sum / n_f).ln() + shift) / beta).exp();

    WeibullModel::new(beta, eta)
}
