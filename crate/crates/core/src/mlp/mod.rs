//! Single-hidden-layer perceptron and its three trainers.
//!
//! The network maps a normalized covariate vector to a single residual-life
//! estimate. The hidden layer always uses the log-sigmoid transfer; the
//! output node is log-sigmoid or linear per layout. Trainers are full-batch
//! and deterministic: gradient descent with momentum ([`train_gd_momentum`]),
//! Levenberg-Marquardt ([`train_lm`]), and Levenberg-Marquardt with Bayesian
//! regularization ([`train_lmbr`]).
//!
//! All training mutates a private copy of the model; independent runs can
//! execute concurrently.

mod gd;
mod lm;

pub use gd::{train_gd_momentum, GdConfig};
pub use lm::{train_lm, train_lmbr, LmConfig};

use rand::Rng;

use crate::rng::seeded;
use crate::{Error, Result};

/// Output-node transfer function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transfer {
    LogSigmoid,
    Linear,
}

impl Transfer {
    pub fn label(&self) -> &'static str {
        match self {
            Transfer::LogSigmoid => "log_sigmoid",
            Transfer::Linear => "linear",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "log_sigmoid" => Ok(Transfer::LogSigmoid),
            "linear" => Ok(Transfer::Linear),
            other => Err(Error::config(format!(
                "unknown transfer function {other:?} (expected log_sigmoid or linear)"
            ))),
        }
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Network shape: input count, hidden count, and the output transfer.
/// There is exactly one output node; the hidden transfer is log-sigmoid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MlpLayout {
    pub n_inputs: usize,
    pub n_hidden: usize,
    pub output_transfer: Transfer,
}

impl MlpLayout {
    pub fn new(n_inputs: usize, n_hidden: usize, output_transfer: Transfer) -> Result<Self> {
        if n_inputs == 0 || n_hidden == 0 {
            return Err(Error::config(format!(
                "layout needs at least one input and one hidden node, got {n_inputs}/{n_hidden}"
            )));
        }
        Ok(Self {
            n_inputs,
            n_hidden,
            output_transfer,
        })
    }

    /// Total trainable parameters: a bias column on the hidden layer plus
    /// a bias on the output node.
    pub fn param_count(&self) -> usize {
        self.n_hidden * (self.n_inputs + 1) + self.n_hidden + 1
    }
}

/// Verdict of the ill-conditioning guard.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conditioning {
    Ok { params: usize, rows: usize },
    Violation { params: usize, rows: usize },
}

impl Conditioning {
    pub fn is_ok(&self) -> bool {
        matches!(self, Conditioning::Ok { .. })
    }
}

/// The training problem is underdetermined once the parameter count
/// exceeds the number of training observations; such layouts are rejected
/// before any second-order trainer runs.
pub fn check_conditioning(layout: &MlpLayout, n_train: usize) -> Conditioning {
    let params = layout.param_count();
    if params <= n_train {
        Conditioning::Ok {
            params,
            rows: n_train,
        }
    } else {
        Conditioning::Violation {
            params,
            rows: n_train,
        }
    }
}

pub(crate) fn ensure_conditioning(layout: &MlpLayout, n_train: usize, context: &str) -> Result<()> {
    match check_conditioning(layout, n_train) {
        Conditioning::Ok { .. } => Ok(()),
        Conditioning::Violation { params, rows } => Err(Error::Conditioning {
            params,
            rows,
            context: if context.is_empty() {
                String::new()
            } else {
                format!(" ({context})")
            },
        }),
    }
}

/// Feed-forward network weights.
///
/// `hidden_weights` is `n_hidden x (n_inputs + 1)` with the bias in the
/// last column; `output_weights` has `n_hidden + 1` entries, bias last.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub layout: MlpLayout,
    pub hidden_weights: Vec<Vec<f64>>,
    pub output_weights: Vec<f64>,
}

impl MlpModel {
    /// Initializes weights uniformly on `[-0.5, 0.5]` from a seeded
    /// deterministic generator; identical (layout, seed) pairs yield
    /// bit-identical models.
    pub fn init(layout: MlpLayout, seed: u64) -> Self {
        let mut rng = seeded(seed);
        let mut draw = |n: usize| -> Vec<f64> {
            (0..n).map(|_| rng.random_range(-0.5..=0.5)).collect()
        };
        let hidden_weights = (0..layout.n_hidden)
            .map(|_| draw(layout.n_inputs + 1))
            .collect();
        let output_weights = draw(layout.n_hidden + 1);
        Self {
            layout,
            hidden_weights,
            output_weights,
        }
    }

    pub fn param_count(&self) -> usize {
        self.layout.param_count()
    }

    /// Flattens all weights: hidden rows in order (bias last per row),
    /// then the output row. Serialization and the trainers share this
    /// ordering.
    pub fn to_params(&self) -> Vec<f64> {
        let mut params = Vec::with_capacity(self.param_count());
        for row in &self.hidden_weights {
            params.extend_from_slice(row);
        }
        params.extend_from_slice(&self.output_weights);
        params
    }

    /// Inverse of [`MlpModel::to_params`].
    pub fn from_params(layout: MlpLayout, params: &[f64]) -> Result<Self> {
        if params.len() != layout.param_count() {
            return Err(Error::ArityMismatch {
                expected: layout.param_count(),
                got: params.len(),
            });
        }
        let stride = layout.n_inputs + 1;
        let hidden_weights = (0..layout.n_hidden)
            .map(|j| params[j * stride..(j + 1) * stride].to_vec())
            .collect();
        let output_weights = params[layout.n_hidden * stride..].to_vec();
        Ok(Self {
            layout,
            hidden_weights,
            output_weights,
        })
    }

    /// Network output for one normalized input vector.
    pub fn forward(&self, input: &[f64]) -> Result<f64> {
        Ok(self.trace(input)?.output)
    }

    fn trace(&self, input: &[f64]) -> Result<Trace> {
        if input.len() != self.layout.n_inputs {
            return Err(Error::ArityMismatch {
                expected: self.layout.n_inputs,
                got: input.len(),
            });
        }
        if let Some(idx) = input.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteInput { index: idx });
        }
        let mut hidden = Vec::with_capacity(self.layout.n_hidden);
        for row in &self.hidden_weights {
            let mut z = row[self.layout.n_inputs];
            for (w, x) in row[..self.layout.n_inputs].iter().zip(input) {
                z += w * x;
            }
            hidden.push(sigmoid(z));
        }
        let mut z_out = self.output_weights[self.layout.n_hidden];
        for (w, h) in self.output_weights[..self.layout.n_hidden].iter().zip(&hidden) {
            z_out += w * h;
        }
        let output = match self.layout.output_transfer {
            Transfer::LogSigmoid => sigmoid(z_out),
            Transfer::Linear => z_out,
        };
        Ok(Trace { hidden, output })
    }

    /// Mean squared error over a batch, in normalized units.
    pub fn mse(&self, inputs: &[Vec<f64>], targets: &[f64]) -> Result<f64> {
        check_batch(self, inputs, targets)?;
        let mut sum = 0.0;
        for (x, &t) in inputs.iter().zip(targets) {
            let e = self.forward(x)? - t;
            sum += e * e;
        }
        Ok(sum / inputs.len() as f64)
    }

    /// Gradient of `E = 1/2 * mean((y - t)^2)` with respect to the flat
    /// parameter vector, by backpropagation.
    pub fn gradient(&self, inputs: &[Vec<f64>], targets: &[f64]) -> Result<Vec<f64>> {
        check_batch(self, inputs, targets)?;
        let n = self.layout.n_inputs;
        let stride = n + 1;
        let out_off = self.layout.n_hidden * stride;
        let mut grad = vec![0.0; self.param_count()];
        let scale = 1.0 / inputs.len() as f64;

        for (x, &t) in inputs.iter().zip(targets) {
            let trace = self.trace(x)?;
            let y = trace.output;
            let err = (y - t) * scale;
            let delta_out = match self.layout.output_transfer {
                Transfer::LogSigmoid => err * y * (1.0 - y),
                Transfer::Linear => err,
            };
            for (j, &h) in trace.hidden.iter().enumerate() {
                grad[out_off + j] += delta_out * h;
                let delta_h = delta_out * self.output_weights[j] * h * (1.0 - h);
                let row = &mut grad[j * stride..(j + 1) * stride];
                for (g, &xi) in row[..n].iter_mut().zip(x) {
                    *g += delta_h * xi;
                }
                row[n] += delta_h;
            }
            grad[out_off + self.layout.n_hidden] += delta_out;
        }
        Ok(grad)
    }

    /// Per-sample output derivatives with respect to every parameter:
    /// one Jacobian row of the residual vector (the residual is `y - t`,
    /// so d r/d w = d y/d w).
    pub(crate) fn output_jacobian_row(&self, input: &[f64], row: &mut [f64]) -> Result<f64> {
        let n = self.layout.n_inputs;
        let stride = n + 1;
        let out_off = self.layout.n_hidden * stride;
        let trace = self.trace(input)?;
        let y = trace.output;
        let dy_dz = match self.layout.output_transfer {
            Transfer::LogSigmoid => y * (1.0 - y),
            Transfer::Linear => 1.0,
        };
        for (j, &h) in trace.hidden.iter().enumerate() {
            row[out_off + j] = dy_dz * h;
            let delta_h = dy_dz * self.output_weights[j] * h * (1.0 - h);
            let r = &mut row[j * stride..(j + 1) * stride];
            for (slot, &xi) in r[..n].iter_mut().zip(input) {
                *slot = delta_h * xi;
            }
            r[n] = delta_h;
        }
        row[out_off + self.layout.n_hidden] = dy_dz;
        Ok(y)
    }
}

struct Trace {
    hidden: Vec<f64>,
    output: f64,
}

fn check_batch(model: &MlpModel, inputs: &[Vec<f64>], targets: &[f64]) -> Result<()> {
    if inputs.is_empty() {
        return Err(Error::EmptyBatch {
            context: "mlp batch",
        });
    }
    if inputs.len() != targets.len() {
        return Err(Error::ArityMismatch {
            expected: inputs.len(),
            got: targets.len(),
        });
    }
    if let Some(bad) = inputs.iter().find(|x| x.len() != model.layout.n_inputs) {
        return Err(Error::ArityMismatch {
            expected: model.layout.n_inputs,
            got: bad.len(),
        });
    }
    Ok(())
}

/// How a training run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Training MSE reached the configured target.
    TargetReached,
    /// The epoch budget ran out.
    EpochLimit,
    /// No further progress was possible (Levenberg-Marquardt damping cap).
    Converged,
}

impl StopReason {
    pub fn label(&self) -> &'static str {
        match self {
            StopReason::TargetReached => "target_reached",
            StopReason::EpochLimit => "epoch_limit",
            StopReason::Converged => "converged",
        }
    }
}

/// Per-epoch record of a training run.
///
/// `mse_per_epoch[k]` is the normalized training MSE after epoch `k`'s
/// weight update. Oscillation is expected for gradient descent at high
/// learning rates; Levenberg-Marquardt entries decrease strictly because
/// only SSE-reducing steps are accepted. `gamma_per_epoch` tracks the
/// effective parameter count and is populated in Bayesian mode only.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainHistory {
    pub mse_per_epoch: Vec<f64>,
    pub stop: StopReason,
    pub gamma_per_epoch: Vec<f64>,
    pub effective_params: Option<f64>,
}

impl TrainHistory {
    pub fn epochs(&self) -> usize {
        self.mse_per_epoch.len()
    }

    pub fn final_mse(&self) -> f64 {
        self.mse_per_epoch.last().copied().unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout(n_in: usize, n_hid: usize, transfer: Transfer) -> MlpLayout {
        MlpLayout::new(n_in, n_hid, transfer).unwrap()
    }

    #[test]
    fn param_counts_match_hand_tally() {
        // 5 inputs, 5 hidden: 5*(5+1) + (5+1) = 36.
        assert_eq!(layout(5, 5, Transfer::LogSigmoid).param_count(), 36);
        // 3 inputs, 3 hidden: 3*4 + 4 = 16.
        assert_eq!(layout(3, 3, Transfer::LogSigmoid).param_count(), 16);
    }

    #[test]
    fn init_is_deterministic_and_bounded() {
        let l = layout(5, 5, Transfer::LogSigmoid);
        let a = MlpModel::init(l, 99);
        let b = MlpModel::init(l, 99);
        assert_eq!(a, b);
        assert!(a.to_params().iter().all(|w| (-0.5..=0.5).contains(w)));
        assert_ne!(a, MlpModel::init(l, 100));
    }

    #[test]
    fn zero_weights_give_transfer_fixed_points() {
        let mut m = MlpModel::init(layout(4, 3, Transfer::LogSigmoid), 0);
        m.hidden_weights.iter_mut().flatten().for_each(|w| *w = 0.0);
        m.output_weights.iter_mut().for_each(|w| *w = 0.0);
        assert_eq!(m.forward(&[0.3, 0.7, 0.1, 0.9]).unwrap(), 0.5);

        m.layout.output_transfer = Transfer::Linear;
        assert_eq!(m.forward(&[0.3, 0.7, 0.1, 0.9]).unwrap(), 0.0);
    }

    #[test]
    fn forward_matches_hand_rolled_two_layer_computation() {
        let m = MlpModel::init(layout(5, 5, Transfer::LogSigmoid), 7);
        let x = [0.21, 0.83, 0.45, 0.08, 0.66];

        // Independent re-computation with explicit loops.
        let sig = |z: f64| 1.0 / (1.0 + (-z).exp());
        let mut z_out = m.output_weights[5];
        for j in 0..5 {
            let mut z = m.hidden_weights[j][5];
            for i in 0..5 {
                z += m.hidden_weights[j][i] * x[i];
            }
            z_out += m.output_weights[j] * sig(z);
        }
        let expected = sig(z_out);
        assert!((m.forward(&x).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn forward_rejects_bad_inputs() {
        let m = MlpModel::init(layout(3, 2, Transfer::LogSigmoid), 1);
        assert!(matches!(
            m.forward(&[0.1, 0.2]),
            Err(Error::ArityMismatch { expected: 3, got: 2 })
        ));
        assert!(matches!(
            m.forward(&[0.1, f64::NAN, 0.2]),
            Err(Error::NonFiniteInput { index: 1 })
        ));
    }

    fn toy_batch(model: &MlpModel, n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<f64>) {
        use rand::Rng;
        let mut rng = crate::rng::seeded(seed);
        let inputs: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..model.layout.n_inputs)
                    .map(|_| rng.random_range(0.05..0.95))
                    .collect()
            })
            .collect();
        let targets = inputs
            .iter()
            .map(|_| rng.random_range(0.1..0.9))
            .collect();
        (inputs, targets)
    }

    /// Central finite differences of the half-MSE objective; the oracle
    /// the analytic gradient is checked against.
    fn fd_gradient(model: &MlpModel, inputs: &[Vec<f64>], targets: &[f64]) -> Vec<f64> {
        let h = 1e-6;
        let params = model.to_params();
        let mut grad = vec![0.0; params.len()];
        for k in 0..params.len() {
            let mut plus = params.clone();
            plus[k] += h;
            let mut minus = params.clone();
            minus[k] -= h;
            let e_plus = MlpModel::from_params(model.layout, &plus)
                .unwrap()
                .mse(inputs, targets)
                .unwrap()
                / 2.0;
            let e_minus = MlpModel::from_params(model.layout, &minus)
                .unwrap()
                .mse(inputs, targets)
                .unwrap()
                / 2.0;
            grad[k] = (e_plus - e_minus) / (2.0 * h);
        }
        grad
    }

    pub(super) fn max_rel_error(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| (x - y).abs() / x.abs().max(y.abs()).max(1e-4))
            .fold(0.0, f64::max)
    }

    #[test]
    fn gradient_matches_finite_differences() {
        for seed in 0..10u64 {
            let m = MlpModel::init(layout(5, 5, Transfer::LogSigmoid), seed);
            let (inputs, targets) = toy_batch(&m, 12, seed + 1000);
            let analytic = m.gradient(&inputs, &targets).unwrap();
            let numeric = fd_gradient(&m, &inputs, &targets);
            let err = max_rel_error(&analytic, &numeric);
            assert!(err < 1e-6, "seed {seed}: relative error {err}");
        }
    }

    #[test]
    fn gradient_matches_finite_differences_linear_output() {
        let m = MlpModel::init(layout(4, 3, Transfer::Linear), 5);
        let (inputs, targets) = toy_batch(&m, 9, 55);
        let err = max_rel_error(
            &m.gradient(&inputs, &targets).unwrap(),
            &fd_gradient(&m, &inputs, &targets),
        );
        assert!(err < 1e-6, "relative error {err}");
    }

    #[test]
    fn gradient_is_zero_at_exact_fit() {
        let m = MlpModel::init(layout(3, 2, Transfer::LogSigmoid), 3);
        let (inputs, _) = toy_batch(&m, 6, 30);
        let targets: Vec<f64> = inputs.iter().map(|x| m.forward(x).unwrap()).collect();
        let grad = m.gradient(&inputs, &targets).unwrap();
        assert!(grad.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn gradient_is_invariant_to_batch_duplication() {
        let m = MlpModel::init(layout(3, 3, Transfer::LogSigmoid), 8);
        let (inputs, targets) = toy_batch(&m, 7, 80);
        let g1 = m.gradient(&inputs, &targets).unwrap();
        let doubled_in: Vec<Vec<f64>> = inputs.iter().chain(&inputs).cloned().collect();
        let doubled_t: Vec<f64> = targets.iter().chain(&targets).copied().collect();
        let g2 = m.gradient(&doubled_in, &doubled_t).unwrap();
        for (a, b) in g1.iter().zip(&g2) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn gradient_rejects_empty_batch() {
        let m = MlpModel::init(layout(3, 2, Transfer::LogSigmoid), 0);
        assert!(matches!(
            m.gradient(&[], &[]),
            Err(Error::EmptyBatch { .. })
        ));
    }

    #[test]
    fn conditioning_guard_thresholds() {
        let five_five = layout(5, 5, Transfer::LogSigmoid);
        let five_six = layout(5, 6, Transfer::LogSigmoid);
        let one_one = layout(1, 1, Transfer::LogSigmoid);
        assert_eq!(
            check_conditioning(&five_five, 40),
            Conditioning::Ok { params: 36, rows: 40 }
        );
        assert_eq!(
            check_conditioning(&five_six, 40),
            Conditioning::Violation { params: 43, rows: 40 }
        );
        assert_eq!(
            check_conditioning(&one_one, 4),
            Conditioning::Ok { params: 4, rows: 4 }
        );
    }

    #[test]
    fn params_round_trip() {
        let m = MlpModel::init(layout(5, 4, Transfer::Linear), 17);
        let back = MlpModel::from_params(m.layout, &m.to_params()).unwrap();
        assert_eq!(m, back);
    }
}
