//! Full-batch gradient descent with momentum.

use super::{MlpModel, StopReason, TrainHistory};
use crate::{Error, Result};

/// Gradient-descent training parameters.
///
/// The classical first-order trainer: high learning rates speed up
/// convergence at the price of oscillation, and the momentum term damps
/// the oscillation. A learning rate of zero is legal and leaves the
/// weights untouched (useful as a control).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GdConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    pub max_epochs: usize,
    pub mse_target: f64,
}

impl GdConfig {
    fn validate(&self) -> Result<()> {
        if !self.learning_rate.is_finite() || self.learning_rate < 0.0 {
            return Err(Error::config(format!(
                "learning rate must be non-negative, got {}",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::config(format!(
                "momentum must lie in [0, 1), got {}",
                self.momentum
            )));
        }
        if self.max_epochs == 0 {
            return Err(Error::config("max_epochs must be at least 1"));
        }
        if !(self.mse_target > 0.0) || !self.mse_target.is_finite() {
            return Err(Error::config(format!(
                "mse_target must be positive, got {}",
                self.mse_target
            )));
        }
        Ok(())
    }
}

/// Trains by full-batch gradient descent with momentum.
///
/// Per epoch: `v <- momentum * v - learning_rate * grad(E)` and
/// `w <- w + v`, where `E` is half the mean squared error. Stops when the
/// recorded MSE reaches `mse_target` or the epoch budget runs out; a
/// non-finite MSE is reported as a divergence error rather than silently
/// restarting.
pub fn train_gd_momentum(
    model: &MlpModel,
    inputs: &[Vec<f64>],
    targets: &[f64],
    cfg: &GdConfig,
) -> Result<(MlpModel, TrainHistory)> {
    cfg.validate()?;
    let mut current = model.clone();
    let mut velocity = vec![0.0; current.param_count()];
    let mut mse_per_epoch = Vec::new();

    for epoch in 0..cfg.max_epochs {
        let grad = current.gradient(inputs, targets)?;
        let mut params = current.to_params();
        for ((w, v), g) in params.iter_mut().zip(&mut velocity).zip(&grad) {
            *v = cfg.momentum * *v - cfg.learning_rate * g;
            *w += *v;
        }
        current = MlpModel::from_params(current.layout, &params)?;

        let mse = current.mse(inputs, targets)?;
        if !mse.is_finite() {
            return Err(Error::Divergence { epoch });
        }
        mse_per_epoch.push(mse);
        if mse <= cfg.mse_target {
            return Ok((
                current,
                TrainHistory {
                    mse_per_epoch,
                    stop: StopReason::TargetReached,
                    gamma_per_epoch: Vec::new(),
                    effective_params: None,
                },
            ));
        }
    }

    Ok((
        current,
        TrainHistory {
            mse_per_epoch,
            stop: StopReason::EpochLimit,
            gamma_per_epoch: Vec::new(),
            effective_params: None,
        },
    ))
}
