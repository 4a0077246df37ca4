//! General regression neural network: a training-free kernel regressor.
//!
//! Construction just stores the training vectors; there is no supervised
//! training. Each hidden unit is a radial basis function centred on one
//! training input with bias `0.8326 / spread`, so its activation falls to
//! one half exactly where the input-to-centre distance equals the spread.
//! The prediction is the kernel-weighted average of the stored targets.

use crate::{Error, Result};

/// Numerator of the bias convention: `exp(-(0.8326)^2)` is 0.5 to within
/// 4.4e-5, which puts the half-activation point at one spread.
pub const BIAS_NUMERATOR: f64 = 0.8326;

/// Kernel regressor over normalized feature rows.
#[derive(Debug, Clone, PartialEq)]
pub struct GrnnModel {
    centers: Vec<Vec<f64>>,
    targets: Vec<f64>,
    spread: f64,
    bias: f64,
}

impl GrnnModel {
    /// Stores the training rows verbatim. Cost is linear in the data;
    /// no iteration is involved.
    pub fn build(inputs: &[Vec<f64>], targets: &[f64], spread: f64) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::EmptyBatch {
                context: "grnn training rows",
            });
        }
        if inputs.len() != targets.len() {
            return Err(Error::ArityMismatch {
                expected: inputs.len(),
                got: targets.len(),
            });
        }
        if !(spread > 0.0) || !spread.is_finite() {
            return Err(Error::config(format!(
                "grnn spread must be positive, got {spread}"
            )));
        }
        let arity = inputs[0].len();
        if let Some(bad) = inputs.iter().find(|x| x.len() != arity) {
            return Err(Error::ArityMismatch {
                expected: arity,
                got: bad.len(),
            });
        }
        Ok(Self {
            centers: inputs.to_vec(),
            targets: targets.to_vec(),
            spread,
            bias: BIAS_NUMERATOR / spread,
        })
    }

    /// Rebuilds a model from stored fields (deserialization).
    pub(crate) fn from_parts(centers: Vec<Vec<f64>>, targets: Vec<f64>, spread: f64) -> Result<Self> {
        Self::build(&centers, &targets, spread)
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.centers[0].len()
    }

    pub fn spread(&self) -> f64 {
        self.spread
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    /// Hidden-unit activation at a given Euclidean distance from a centre:
    /// `exp(-(distance * bias)^2)`.
    pub fn kernel(&self, distance: f64) -> f64 {
        let z = distance * self.bias;
        (-(z * z)).exp()
    }

    /// Kernel-weighted average of the stored targets.
    ///
    /// If every kernel underflows to zero (input far from all centres at a
    /// small spread) the prediction falls back to the nearest centre's
    /// target, breaking ties toward the lowest row index.
    pub fn predict(&self, input: &[f64]) -> Result<f64> {
        if input.len() != self.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                got: input.len(),
            });
        }
        if let Some(idx) = input.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteInput { index: idx });
        }

        let mut num = 0.0;
        let mut den = 0.0;
        let mut nearest = (f64::INFINITY, 0usize);
        for (i, (c, &t)) in self.centers.iter().zip(&self.targets).enumerate() {
            let dist2: f64 = c.iter().zip(input).map(|(a, b)| (a - b) * (a - b)).sum();
            let dist = dist2.sqrt();
            if dist < nearest.0 {
                nearest = (dist, i);
            }
            let k = self.kernel(dist);
            num += t * k;
            den += k;
        }
        if den == 0.0 {
            return Ok(self.targets[nearest.1]);
        }
        Ok(num / den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(points: &[(&[f64], f64)]) -> (Vec<Vec<f64>>, Vec<f64>) {
        (
            points.iter().map(|(x, _)| x.to_vec()).collect(),
            points.iter().map(|(_, t)| *t).collect(),
        )
    }

    #[test]
    fn bias_follows_spread_convention() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64 * 0.1]).collect();
        let t = vec![0.1; 10];
        let m = GrnnModel::build(&x, &t, 0.05).unwrap();
        assert_eq!(m.len(), 10);
        assert_eq!(m.bias(), BIAS_NUMERATOR / 0.05);
        assert!((m.bias() - 16.652).abs() < 1e-12);
    }

    #[test]
    fn kernel_is_half_at_one_spread() {
        let (x, t) = rows(&[(&[0.0, 0.0], 1.0)]);
        for spread in [0.01, 0.03, 0.1, 1.0] {
            let m = GrnnModel::build(&x, &t, spread).unwrap();
            assert!((m.kernel(spread) - 0.5).abs() < 1e-4);
        }
    }

    #[test]
    fn lone_center_dominates_at_any_distance() {
        let (x, t) = rows(&[(&[0.25, 0.75], 0.42)]);
        let m = GrnnModel::build(&x, &t, 0.03).unwrap();
        for input in [[0.25, 0.78], [0.9, 0.1], [0.25, 0.75]] {
            assert_eq!(m.predict(&input).unwrap(), 0.42);
        }
    }

    #[test]
    fn small_spread_interpolates_training_points() {
        let (x, t) = rows(&[
            (&[0.0, 0.0], 0.2),
            (&[1.0, 0.0], 0.9),
            (&[0.0, 1.0], 0.5),
        ]);
        let m = GrnnModel::build(&x, &t, 0.01).unwrap();
        for (c, &target) in x.iter().zip(&t) {
            let p = m.predict(c).unwrap();
            assert!((p - target).abs() < 1e-6, "{p} vs {target}");
        }
    }

    #[test]
    fn zero_or_negative_spread_is_rejected() {
        let (x, t) = rows(&[(&[0.0], 0.0)]);
        assert!(GrnnModel::build(&x, &t, 0.0).is_err());
        assert!(GrnnModel::build(&x, &t, -0.1).is_err());
        assert!(GrnnModel::build(&[], &[], 0.1).is_err());
    }

    #[test]
    fn output_is_a_convex_combination_of_targets() {
        use rand::Rng;
        let mut rng = crate::rng::seeded(404);
        let x: Vec<Vec<f64>> = (0..20)
            .map(|_| (0..3).map(|_| rng.random_range(0.0..1.0)).collect())
            .collect();
        let t: Vec<f64> = (0..20).map(|_| rng.random_range(-2.0..2.0)).collect();
        let (lo, hi) = t
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
                (l.min(v), h.max(v))
            });
        let m = GrnnModel::build(&x, &t, 0.2).unwrap();
        for _ in 0..200 {
            let q: Vec<f64> = (0..3).map(|_| rng.random_range(-0.5..1.5)).collect();
            let p = m.predict(&q).unwrap();
            assert!(p >= lo - 1e-12 && p <= hi + 1e-12, "{p} outside [{lo}, {hi}]");
        }
    }

    #[test]
    fn duplicating_training_set_leaves_predictions_unchanged() {
        let (x, t) = rows(&[
            (&[0.1, 0.4], 0.3),
            (&[0.8, 0.2], 0.7),
            (&[0.5, 0.9], 0.1),
        ]);
        let m1 = GrnnModel::build(&x, &t, 0.15).unwrap();
        let x2: Vec<Vec<f64>> = x.iter().chain(&x).cloned().collect();
        let t2: Vec<f64> = t.iter().chain(&t).copied().collect();
        let m2 = GrnnModel::build(&x2, &t2, 0.15).unwrap();
        for q in [[0.2, 0.3], [0.7, 0.7], [0.0, 1.0]] {
            let a = m1.predict(&q).unwrap();
            let b = m2.predict(&q).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn underflow_falls_back_to_nearest_center() {
        let (x, t) = rows(&[(&[0.0, 0.0], 0.25), (&[1.0, 1.0], 0.75)]);
        let m = GrnnModel::build(&x, &t, 1e-3).unwrap();
        // Closer to the second centre, but far enough that every kernel
        // underflows at this spread.
        assert_eq!(m.predict(&[0.9, 0.8]).unwrap(), 0.75);
        // Equidistant: tie breaks toward the lowest row index.
        assert_eq!(m.predict(&[0.5, 0.5]).unwrap(), 0.25);
    }
}
