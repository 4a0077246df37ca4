//! Levenberg-Marquardt training, optionally with Bayesian regularization.
//!
//! Each iteration solves the damped normal equations
//! `(J'J + lambda*I) * delta = -J'r` for the residual Jacobian `J` and
//! residual vector `r = y - t`. Steps that reduce the objective are
//! accepted and relax the damping; rejected steps raise it and retry, so
//! at high damping the method degenerates to a short gradient-descent
//! step.
//!
//! In Bayesian mode the objective becomes `F = beta*E_D + alpha*E_W`
//! (data error plus weight penalty) and the trade-off hyperparameters are
//! re-estimated after every accepted step from the effective number of
//! parameters `gamma`, using the Gauss-Newton approximation of the
//! Hessian.

use nalgebra::{DMatrix, DVector};

use super::{ensure_conditioning, MlpModel, StopReason, TrainHistory};
use crate::{Error, Result};

/// Damping value beyond which the search is abandoned.
const LAMBDA_CAP: f64 = 1e10;

/// Levenberg-Marquardt training parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmConfig {
    /// Initial damping.
    pub lambda_init: f64,
    /// Multiplicative damping adjustment per reject/accept.
    pub lambda_factor: f64,
    pub max_epochs: usize,
    /// Stopping threshold on the normalized training MSE.
    pub mse_target: f64,
    /// Enables Bayesian regularization.
    pub bayesian: bool,
}

impl Default for LmConfig {
    fn default() -> Self {
        Self {
            lambda_init: 1e-3,
            lambda_factor: 10.0,
            max_epochs: 100,
            mse_target: 1e-5,
            bayesian: false,
        }
    }
}

impl LmConfig {
    fn validate(&self) -> Result<()> {
        if !(self.lambda_init > 0.0) || !self.lambda_init.is_finite() {
            return Err(Error::config(format!(
                "lambda_init must be positive, got {}",
                self.lambda_init
            )));
        }
        if !(self.lambda_factor > 1.0) || !self.lambda_factor.is_finite() {
            return Err(Error::config(format!(
                "lambda_factor must exceed 1, got {}",
                self.lambda_factor
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

/// Trains with the standard Levenberg-Marquardt algorithm.
///
/// Precondition: the parameter count must not exceed the number of
/// training rows (see [`super::check_conditioning`]). If the entry model
/// already meets `mse_target` the weights are returned unchanged.
pub fn train_lm(
    model: &MlpModel,
    inputs: &[Vec<f64>],
    targets: &[f64],
    cfg: &LmConfig,
) -> Result<(MlpModel, TrainHistory)> {
    if cfg.bayesian {
        run(model, inputs, targets, cfg, true)
    } else {
        run(model, inputs, targets, cfg, false)
    }
}

/// Trains with Levenberg-Marquardt plus Bayesian regularization,
/// regardless of the `bayesian` flag in `cfg`.
pub fn train_lmbr(
    model: &MlpModel,
    inputs: &[Vec<f64>],
    targets: &[f64],
    cfg: &LmConfig,
) -> Result<(MlpModel, TrainHistory)> {
    run(model, inputs, targets, cfg, true)
}

fn jacobian_residual(
    model: &MlpModel,
    inputs: &[Vec<f64>],
    targets: &[f64],
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let n = inputs.len();
    let w = model.param_count();
    let mut jac = DMatrix::zeros(n, w);
    let mut res = DVector::zeros(n);
    let mut row = vec![0.0; w];
    for k in 0..n {
        let y = model.output_jacobian_row(&inputs[k], &mut row)?;
        for (c, &v) in row.iter().enumerate() {
            jac[(k, c)] = v;
        }
        res[k] = y - targets[k];
    }
    Ok((jac, res))
}

fn run(
    model: &MlpModel,
    inputs: &[Vec<f64>],
    targets: &[f64],
    cfg: &LmConfig,
    bayesian: bool,
) -> Result<(MlpModel, TrainHistory)> {
    cfg.validate()?;
    if inputs.is_empty() {
        return Err(Error::EmptyBatch {
            context: "Levenberg-Marquardt batch",
        });
    }
    if inputs.len() != targets.len() {
        return Err(Error::ArityMismatch {
            expected: inputs.len(),
            got: targets.len(),
        });
    }
    ensure_conditioning(&model.layout, inputs.len(), "Levenberg-Marquardt")?;

    let n = inputs.len() as f64;
    let w_count = model.param_count();
    let layout = model.layout;

    let mut current = model.clone();
    let mut params = DVector::from_vec(current.to_params());
    let (mut jac, mut res) = jacobian_residual(&current, inputs, targets)?;
    let mut sse = res.norm_squared();
    let mut ssw = params.norm_squared();

    let mut history = TrainHistory {
        mse_per_epoch: Vec::new(),
        stop: StopReason::EpochLimit,
        gamma_per_epoch: Vec::new(),
        effective_params: None,
    };

    if sse / n <= cfg.mse_target {
        history.mse_per_epoch.push(sse / n);
        history.stop = StopReason::TargetReached;
        return Ok((current, history));
    }

    // Regularization hyperparameters; fixed at (0, 1) for plain LM, which
    // reduces the objective to the SSE.
    let mut alpha = 0.0_f64;
    let mut beta = 1.0_f64;
    let mut gamma = w_count as f64;

    let mut lambda = cfg.lambda_init;

    'epochs: for _ in 0..cfg.max_epochs {
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * &res;
        let objective = beta * sse + alpha * ssw;

        let mut accepted = false;
        let mut solved_any = false;
        while lambda <= LAMBDA_CAP {
            let mut a = &jtj * beta;
            for d in 0..w_count {
                a[(d, d)] += alpha + lambda;
            }
            let grad = &jtr * beta + &params * alpha;
            if let Some(chol) = nalgebra::linalg::Cholesky::new(a) {
                solved_any = true;
                let delta = chol.solve(&(-&grad));
                let cand_params = &params + &delta;
                if let Ok(cand_model) = MlpModel::from_params(layout, cand_params.as_slice()) {
                    if let Ok(cand_mse) = cand_model.mse(inputs, targets) {
                        let cand_sse = cand_mse * n;
                        let cand_ssw = cand_params.norm_squared();
                        let cand_obj = beta * cand_sse + alpha * cand_ssw;
                        if cand_obj.is_finite() && cand_obj < objective {
                            params = cand_params;
                            current = cand_model;
                            lambda /= cfg.lambda_factor;
                            accepted = true;
                            break;
                        }
                    }
                }
            }
            lambda *= cfg.lambda_factor;
        }

        if !accepted {
            if !solved_any {
                return Err(Error::SingularNormalMatrix);
            }
            history.stop = StopReason::Converged;
            break 'epochs;
        }

        let (j2, r2) = jacobian_residual(&current, inputs, targets)?;
        jac = j2;
        res = r2;
        sse = res.norm_squared();
        ssw = params.norm_squared();

        if bayesian {
            // Effective parameter count from the Gauss-Newton Hessian of
            // F: H = 2*beta*J'J + 2*alpha*I, gamma = W - 2*alpha*tr(H^-1).
            if alpha > 0.0 {
                let mut hess = jac.transpose() * &jac * (2.0 * beta);
                for d in 0..w_count {
                    hess[(d, d)] += 2.0 * alpha;
                }
                if let Some(chol) = nalgebra::linalg::Cholesky::new(hess) {
                    gamma = w_count as f64 - 2.0 * alpha * chol.inverse().trace();
                }
            } else {
                gamma = w_count as f64;
            }
            alpha = if ssw > 0.0 { gamma / (2.0 * ssw) } else { 1e-8 };
            if sse > 0.0 {
                beta = (n - gamma) / (2.0 * sse);
            }
            history.gamma_per_epoch.push(gamma);
        }

        let mse = sse / n;
        if !mse.is_finite() {
            return Err(Error::Divergence {
                epoch: history.mse_per_epoch.len(),
            });
        }
        history.mse_per_epoch.push(mse);
        if mse <= cfg.mse_target {
            history.stop = StopReason::TargetReached;
            break 'epochs;
        }
    }

    if bayesian {
        history.effective_params = history.gamma_per_epoch.last().copied();
    }
    Ok((current, history))
}
