//! Comparison protocols and error metrics.
//!
//! Two protocols: a static split (fixed training and test run sets) and
//! grouped cross-validation, where whole runs are never split across the
//! train/test boundary and each group is tested exactly once. Every fold
//! is an independent training run: the normalizer is refitted and the
//! model reinitialized from a seed derived from the group identity, so
//! nothing leaks from test rows into training and fold results do not
//! depend on group order.
//!
//! Metrics follow the reporting convention of the study this reproduces:
//! MSE in normalized units, average/maximum absolute error and
//! sum-of-squares error in physical units (seconds or days).

use std::collections::BTreeSet;
use std::fmt;

use crate::dataset::{ColumnRange, Normalizer};
use crate::features::FeatureRow;
use crate::grnn::GrnnModel;
use crate::mlp::{
    check_conditioning, train_gd_momentum, train_lm, train_lmbr, Conditioning, GdConfig, LmConfig,
    MlpLayout, MlpModel, TrainHistory,
};
use crate::model_io::SavedEstimator;
use crate::rng::fnv1a64;
use crate::weibull::{fit_weibull_mle, WeibullModel};
use crate::{Error, Result};

/// One whole run (or pump): the unit of train/test partitioning.
#[derive(Debug, Clone, PartialEq)]
pub struct RunGroup {
    pub id: String,
    pub rows: Vec<FeatureRow>,
}

impl RunGroup {
    /// Groups rows by their provenance id, sorted by id; row order within
    /// a group follows the input.
    pub fn group_by_id(rows: &[FeatureRow]) -> Vec<RunGroup> {
        let mut map: std::collections::BTreeMap<String, Vec<FeatureRow>> =
            std::collections::BTreeMap::new();
        for row in rows {
            map.entry(row.group_id.clone()).or_default().push(row.clone());
        }
        map.into_iter()
            .map(|(id, rows)| RunGroup { id, rows })
            .collect()
    }
}

/// Estimator family plus its configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum EstimatorConfig {
    GdMomentum { layout: MlpLayout, cfg: GdConfig },
    Lm { layout: MlpLayout, cfg: LmConfig },
    Lmbr { layout: MlpLayout, cfg: LmConfig },
    Grnn { spread: f64 },
    WeibullBaseline,
}

impl EstimatorConfig {
    pub fn kind_label(&self) -> &'static str {
        match self {
            EstimatorConfig::GdMomentum { .. } => "gd",
            EstimatorConfig::Lm { .. } => "lm",
            EstimatorConfig::Lmbr { .. } => "lmbr",
            EstimatorConfig::Grnn { .. } => "grnn",
            EstimatorConfig::WeibullBaseline => "weibull-baseline",
        }
    }

    fn layout(&self) -> Option<&MlpLayout> {
        match self {
            EstimatorConfig::GdMomentum { layout, .. }
            | EstimatorConfig::Lm { layout, .. }
            | EstimatorConfig::Lmbr { layout, .. } => Some(layout),
            _ => None,
        }
    }
}

/// A labelled estimator entry for the protocols.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub label: String,
    pub seed: u64,
    pub config: EstimatorConfig,
}

/// Estimator trained by one protocol run.
#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    Mlp(MlpModel),
    Grnn(GrnnModel),
    Weibull(WeibullModel),
}

impl TrainedModel {
    pub fn into_saved_estimator(self) -> SavedEstimator {
        match self {
            TrainedModel::Mlp(m) => SavedEstimator::Mlp(m),
            TrainedModel::Grnn(g) => SavedEstimator::Grnn(g),
            TrainedModel::Weibull(w) => SavedEstimator::Weibull(w),
        }
    }
}

/// Aggregate error metrics of one prediction set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    /// Mean squared error over normalized target values.
    pub mse_normalized: f64,
    /// Mean absolute error in physical units.
    pub avg_abs_error: f64,
    /// Largest absolute error in physical units.
    pub max_abs_error: f64,
    /// Sum of squared errors in physical units squared.
    pub sse: f64,
}

/// Computes the aggregate metrics from physical-unit predictions.
pub fn metrics(predicted: &[f64], actual: &[f64], target_range: &ColumnRange) -> Result<Metrics> {
    if predicted.is_empty() {
        return Err(Error::EmptyBatch {
            context: "metrics input",
        });
    }
    if predicted.len() != actual.len() {
        return Err(Error::ArityMismatch {
            expected: predicted.len(),
            got: actual.len(),
        });
    }
    let n = predicted.len() as f64;
    let mut mse = 0.0;
    let mut avg = 0.0;
    let mut max = 0.0_f64;
    let mut sse = 0.0;
    for (&p, &a) in predicted.iter().zip(actual) {
        let e = p - a;
        avg += e.abs();
        max = max.max(e.abs());
        sse += e * e;
        let en = target_range.normalize(p) - target_range.normalize(a);
        mse += en * en;
    }
    Ok(Metrics {
        mse_normalized: mse / n,
        avg_abs_error: avg / n,
        max_abs_error: max,
        sse,
    })
}

/// One scored observation, in physical units.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub group_id: String,
    pub obs_time: f64,
    pub predicted: f64,
    pub actual: f64,
}

impl Observation {
    pub fn error(&self) -> f64 {
        self.predicted - self.actual
    }
}

/// Per-observation predictions plus their aggregates. The target range
/// travels with the report so every aggregate can be recomputed from the
/// observation list alone.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub observations: Vec<Observation>,
    pub target_range: ColumnRange,
    pub metrics: Metrics,
}

impl EvalReport {
    pub fn build(observations: Vec<Observation>, target_range: ColumnRange) -> Result<Self> {
        let predicted: Vec<f64> = observations.iter().map(|o| o.predicted).collect();
        let actual: Vec<f64> = observations.iter().map(|o| o.actual).collect();
        let metrics = metrics(&predicted, &actual, &target_range)?;
        Ok(Self {
            observations,
            target_range,
            metrics,
        })
    }
}

/// Model trained under a protocol, with everything needed to apply it.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedSpec {
    pub model: TrainedModel,
    pub normalizer: Normalizer,
    pub history: Option<TrainHistory>,
}

impl FittedSpec {
    /// Physical-unit residual-life prediction for one raw feature row.
    pub fn predict(&self, row: &FeatureRow) -> Result<f64> {
        predict_row(&self.model, &self.normalizer, row)
    }
}

fn feature_matrix(rows: &[&FeatureRow]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|r| {
            let mut v = r.inputs.clone();
            v.push(r.target);
            v
        })
        .collect()
}

fn normalized_inputs(normalizer: &Normalizer, row: &FeatureRow) -> Result<Vec<f64>> {
    let ranges = normalizer.ranges();
    if row.inputs.len() + 1 != ranges.len() {
        return Err(Error::ArityMismatch {
            expected: ranges.len() - 1,
            got: row.inputs.len(),
        });
    }
    Ok(row
        .inputs
        .iter()
        .zip(ranges)
        .map(|(&x, r)| r.normalize(x))
        .collect())
}

fn target_range(normalizer: &Normalizer) -> ColumnRange {
    *normalizer.ranges().last().expect("normalizer has columns")
}

/// Trains one estimator on raw training rows (normalizer already fitted
/// on exactly those rows).
fn train_estimator(
    spec: &ModelSpec,
    seed: u64,
    train_rows: &[&FeatureRow],
    normalizer: &Normalizer,
) -> Result<(TrainedModel, Option<TrainHistory>)> {
    if let Some(layout) = spec.config.layout() {
        if layout.n_inputs != normalizer.arity() - 1 {
            return Err(Error::ArityMismatch {
                expected: normalizer.arity() - 1,
                got: layout.n_inputs,
            });
        }
        if let Conditioning::Violation { params, rows } =
            check_conditioning(layout, train_rows.len())
        {
            return Err(Error::Conditioning {
                params,
                rows,
                context: format!(" (model {})", spec.label),
            });
        }
    }

    let t_range = target_range(normalizer);
    let norm_in: Vec<Vec<f64>> = train_rows
        .iter()
        .map(|r| normalized_inputs(normalizer, r))
        .collect::<Result<_>>()?;
    let norm_t: Vec<f64> = train_rows
        .iter()
        .map(|r| t_range.normalize(r.target))
        .collect();

    match &spec.config {
        EstimatorConfig::GdMomentum { layout, cfg } => {
            let init = MlpModel::init(*layout, seed);
            let (model, history) = train_gd_momentum(&init, &norm_in, &norm_t, cfg)?;
            Ok((TrainedModel::Mlp(model), Some(history)))
        }
        EstimatorConfig::Lm { layout, cfg } => {
            let init = MlpModel::init(*layout, seed);
            let (model, history) = train_lm(&init, &norm_in, &norm_t, cfg)?;
            Ok((TrainedModel::Mlp(model), Some(history)))
        }
        EstimatorConfig::Lmbr { layout, cfg } => {
            let init = MlpModel::init(*layout, seed);
            let (model, history) = train_lmbr(&init, &norm_in, &norm_t, cfg)?;
            Ok((TrainedModel::Mlp(model), Some(history)))
        }
        EstimatorConfig::Grnn { spread } => {
            let model = GrnnModel::build(&norm_in, &norm_t, *spread)?;
            Ok((TrainedModel::Grnn(model), None))
        }
        EstimatorConfig::WeibullBaseline => {
            let failures = group_failure_times(train_rows)?;
            let model = fit_weibull_mle(&failures)?;
            Ok((TrainedModel::Weibull(model), None))
        }
    }
}

/// One failure time per training run: the observation instant plus the
/// residual target is constant along a renewal run.
fn group_failure_times(rows: &[&FeatureRow]) -> Result<Vec<f64>> {
    let mut by_group: std::collections::BTreeMap<&str, f64> = std::collections::BTreeMap::new();
    for row in rows {
        let failure = row.obs_time + row.target;
        match by_group.get(row.group_id.as_str()) {
            None => {
                by_group.insert(&row.group_id, failure);
            }
            Some(&known) => {
                if (known - failure).abs() > 1e-6 * known.abs().max(1.0) {
                    return Err(Error::Protocol(format!(
                        "weibull-baseline needs single-failure runs, but group {} implies \
                         failure times {known} and {failure}",
                        row.group_id
                    )));
                }
            }
        }
    }
    Ok(by_group.into_values().collect())
}

fn predict_row(model: &TrainedModel, normalizer: &Normalizer, row: &FeatureRow) -> Result<f64> {
    let t_range = target_range(normalizer);
    match model {
        TrainedModel::Mlp(m) => {
            let y = m.forward(&normalized_inputs(normalizer, row)?)?;
            Ok(t_range.denormalize(y))
        }
        TrainedModel::Grnn(g) => {
            let y = g.predict(&normalized_inputs(normalizer, row)?)?;
            Ok(t_range.denormalize(y))
        }
        TrainedModel::Weibull(w) => w.baseline_residual(row.obs_time),
    }
}

fn report_for(
    model: &TrainedModel,
    normalizer: &Normalizer,
    groups: &[&RunGroup],
) -> Result<EvalReport> {
    let mut observations = Vec::new();
    for group in groups {
        for row in &group.rows {
            observations.push(Observation {
                group_id: row.group_id.clone(),
                obs_time: row.obs_time,
                predicted: predict_row(model, normalizer, row)?,
                actual: row.target,
            });
        }
    }
    EvalReport::build(observations, target_range(normalizer))
}

/// Result of one static-split evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticSplitOutcome {
    pub fitted: FittedSpec,
    pub train_report: EvalReport,
    pub test_report: EvalReport,
}

/// Trains on the training runs and scores both sides.
///
/// The normalizer is fitted on training rows only; test rows may fall
/// outside its ranges and extrapolate. Predictions are denormalized
/// before any physical-unit metric.
pub fn static_split_eval(
    train: &[RunGroup],
    test: &[RunGroup],
    spec: &ModelSpec,
) -> Result<StaticSplitOutcome> {
    let train_ids: BTreeSet<&str> = train.iter().map(|g| g.id.as_str()).collect();
    for g in test {
        if train_ids.contains(g.id.as_str()) {
            return Err(Error::OverlappingGroups { id: g.id.clone() });
        }
    }
    if train.is_empty() || test.is_empty() {
        return Err(Error::Protocol(
            "static split needs at least one training and one test group".into(),
        ));
    }

    let train_rows: Vec<&FeatureRow> = train.iter().flat_map(|g| &g.rows).collect();
    let normalizer = Normalizer::fit(&feature_matrix(&train_rows))?;
    let (model, history) = train_estimator(spec, spec.seed, &train_rows, &normalizer)?;

    let train_report = report_for(&model, &normalizer, &train.iter().collect::<Vec<_>>())?;
    let test_report = report_for(&model, &normalizer, &test.iter().collect::<Vec<_>>())?;
    Ok(StaticSplitOutcome {
        fitted: FittedSpec {
            model,
            normalizer,
            history,
        },
        train_report,
        test_report,
    })
}

/// One cross-validation fold: the named group was the test set.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldReport {
    pub group_id: String,
    pub fitted: FittedSpec,
    pub train_report: EvalReport,
    pub test_report: EvalReport,
}

/// Cross-validation outcome: per-fold reports in group-id order plus the
/// summed test SSE the comparison tables rank by.
#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub folds: Vec<FoldReport>,
    pub total_sse: f64,
}

/// Grouped cross-validation: each group is tested exactly once against a
/// model trained on all the others.
///
/// Every fold is a completely independent training run; its seed derives
/// from the spec seed and the group identity (not the group's position),
/// so permuting the input order changes nothing.
pub fn cross_validate(groups: &[RunGroup], spec: &ModelSpec) -> Result<CvReport> {
    if groups.len() < 2 {
        return Err(Error::TooFewGroups { got: groups.len() });
    }
    let mut seen = BTreeSet::new();
    for g in groups {
        if !seen.insert(g.id.as_str()) {
            return Err(Error::OverlappingGroups { id: g.id.clone() });
        }
    }

    let mut ordered: Vec<&RunGroup> = groups.iter().collect();
    ordered.sort_by(|a, b| a.id.cmp(&b.id));

    let mut folds = Vec::with_capacity(ordered.len());
    let mut total_sse = 0.0;
    for (i, test_group) in ordered.iter().enumerate() {
        let train_groups: Vec<&RunGroup> = ordered
            .iter()
            .enumerate()
            .filter_map(|(j, g)| (j != i).then_some(*g))
            .collect();
        let train_rows: Vec<&FeatureRow> = train_groups.iter().flat_map(|g| &g.rows).collect();
        let normalizer = Normalizer::fit(&feature_matrix(&train_rows))?;
        let fold_seed = spec.seed ^ fnv1a64(&test_group.id);
        let (model, history) = train_estimator(spec, fold_seed, &train_rows, &normalizer)
            .map_err(|e| match e {
                Error::Conditioning { params, rows, .. } => Error::Conditioning {
                    params,
                    rows,
                    context: format!(" (fold testing {})", test_group.id),
                },
                other => other,
            })?;

        let train_report = report_for(&model, &normalizer, &train_groups)?;
        let test_report = report_for(&model, &normalizer, &[test_group])?;
        total_sse += test_report.metrics.sse;
        folds.push(FoldReport {
            group_id: test_group.id.clone(),
            fitted: FittedSpec {
                model,
                normalizer,
                history,
            },
            train_report,
            test_report,
        });
    }
    Ok(CvReport { folds, total_sse })
}

/// Protocol selector for [`compare_models`].
#[derive(Debug, Clone, Copy)]
pub enum Protocol<'a> {
    StaticSplit {
        train: &'a [RunGroup],
        test: &'a [RunGroup],
    },
    CrossValidation { groups: &'a [RunGroup] },
}

/// One line of a comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub label: String,
    pub score: f64,
}

/// Ranked comparison across model specs, ascending by score; ties keep
/// the input order.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub score_name: &'static str,
    pub rows: Vec<ComparisonRow>,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .rows
            .iter()
            .map(|r| r.label.len())
            .max()
            .unwrap_or(5)
            .max("model".len());
        writeln!(f, "{:<width$}  {}", "model", self.score_name)?;
        for row in &self.rows {
            writeln!(f, "{:<width$}  {:.6e}", row.label, row.score)?;
        }
        Ok(())
    }
}

/// Runs every spec under the protocol and ranks them: by total test SSE
/// under cross-validation, by test MSE under a static split.
pub fn compare_models(specs: &[ModelSpec], protocol: &Protocol<'_>) -> Result<Comparison> {
    if specs.len() < 2 {
        return Err(Error::Protocol(format!(
            "comparison needs at least 2 model specs, got {}",
            specs.len()
        )));
    }
    let mut rows = Vec::with_capacity(specs.len());
    let score_name = match protocol {
        Protocol::StaticSplit { .. } => "test_mse",
        Protocol::CrossValidation { .. } => "total_sse",
    };
    for spec in specs {
        let score = match protocol {
            Protocol::StaticSplit { train, test } => {
                static_split_eval(train, test, spec)?
                    .test_report
                    .metrics
                    .mse_normalized
            }
            Protocol::CrossValidation { groups } => cross_validate(groups, spec)?.total_sse,
        };
        rows.push(ComparisonRow {
            label: spec.label.clone(),
            score,
        });
    }
    rows.sort_by(|a, b| a.score.partial_cmp(&b.score).expect("finite scores"));
    Ok(Comparison { score_name, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlp::Transfer;

    /// Small synthetic groups with a learnable linear-ish structure.
    fn toy_groups(n_groups: usize, rows_per_group: usize, seed: u64) -> Vec<RunGroup> {
        use rand::Rng;
        let mut rng = crate::rng::seeded(seed);
        (0..n_groups)
            .map(|g| {
                let scale = 100.0 + 40.0 * (g as f64) + rng.random_range(-5.0..5.0);
                let rows = (0..rows_per_group)
                    .map(|k| {
                        let t = k as f64 * 10.0;
                        FeatureRow {
                            group_id: format!("g{g:02}"),
                            obs_time: t,
                            inputs: vec![t, scale],
                            target: (2.0 * scale - t).max(1.0),
                        }
                    })
                    .collect();
                RunGroup {
                    id: format!("g{g:02}"),
                    rows,
                }
            })
            .collect()
    }

    fn lm_spec(seed: u64) -> ModelSpec {
        ModelSpec {
            label: "lm".into(),
            seed,
            config: EstimatorConfig::Lm {
                layout: MlpLayout::new(2, 2, Transfer::LogSigmoid).unwrap(),
                cfg: LmConfig {
                    mse_target: 1e-4,
                    max_epochs: 60,
                    ..LmConfig::default()
                },
            },
        }
    }

    #[test]
    fn metrics_match_hand_computation() {
        let range = ColumnRange { min: 0.0, max: 200.0 };
        let m = metrics(&[110.0], &[10.0], &range).unwrap();
        assert_eq!(m.sse, 10000.0);
        assert_eq!(m.avg_abs_error, 100.0);
        assert_eq!(m.max_abs_error, 100.0);
        assert!((m.mse_normalized - 0.25).abs() < 1e-15);

        let exact = metrics(&[1.0, 2.0], &[1.0, 2.0], &range).unwrap();
        assert_eq!(exact.sse, 0.0);
        assert_eq!(exact.mse_normalized, 0.0);

        // Three-row fixture, computed by hand: errors 1, -2, 3.
        let m3 = metrics(&[2.0, 3.0, 9.0], &[1.0, 5.0, 6.0], &range).unwrap();
        assert_eq!(m3.sse, 1.0 + 4.0 + 9.0);
        assert!((m3.avg_abs_error - 2.0).abs() < 1e-15);
        assert_eq!(m3.max_abs_error, 3.0);
        assert!((m3.mse_normalized - (14.0 / 3.0) / (200.0 * 200.0)).abs() < 1e-18);
    }

    #[test]
    fn metrics_reject_bad_shapes() {
        let range = ColumnRange { min: 0.0, max: 1.0 };
        assert!(metrics(&[], &[], &range).is_err());
        assert!(metrics(&[1.0], &[1.0, 2.0], &range).is_err());
    }

    #[test]
    fn static_split_bookkeeping_and_determinism() {
        let groups = toy_groups(6, 8, 1);
        let (train, test) = groups.split_at(4);
        let spec = lm_spec(9);
        let a = static_split_eval(train, test, &spec).unwrap();
        assert_eq!(a.train_report.observations.len(), 4 * 8);
        assert_eq!(a.test_report.observations.len(), 2 * 8);
        let b = static_split_eval(train, test, &spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn static_split_rejects_overlap() {
        let groups = toy_groups(3, 6, 2);
        let err = static_split_eval(&groups, &groups[..1], &lm_spec(1)).unwrap_err();
        assert!(matches!(err, Error::OverlappingGroups { .. }));
    }

    #[test]
    fn weibull_baseline_predictions_follow_the_characteristic_life() {
        let groups = toy_groups(6, 8, 3);
        let (train, test) = groups.split_at(4);
        let spec = ModelSpec {
            label: "weibull".into(),
            seed: 0,
            config: EstimatorConfig::WeibullBaseline,
        };
        let outcome = static_split_eval(train, test, &spec).unwrap();
        let eta = match &outcome.fitted.model {
            TrainedModel::Weibull(w) => w.eta,
            other => panic!("unexpected model {other:?}"),
        };
        for obs in &outcome.test_report.observations {
            assert_eq!(obs.predicted, (eta - obs.obs_time).max(0.0));
        }
    }

    #[test]
    fn cross_validation_tests_every_group_once() {
        let groups = toy_groups(8, 7, 4);
        let report = cross_validate(&groups, &lm_spec(5)).unwrap();
        assert_eq!(report.folds.len(), 8);
        let tested: BTreeSet<&str> = report.folds.iter().map(|f| f.group_id.as_str()).collect();
        assert_eq!(tested.len(), 8);
        for fold in &report.folds {
            assert_eq!(fold.test_report.observations.len(), 7);
            assert!(fold
                .test_report
                .observations
                .iter()
                .all(|o| o.group_id == fold.group_id));
        }
        let sum: f64 = report.folds.iter().map(|f| f.test_report.metrics.sse).sum();
        assert!((report.total_sse - sum).abs() <= 1e-9 * sum.abs());
    }

    #[test]
    fn cross_validation_is_order_independent() {
        let groups = toy_groups(5, 6, 6);
        let spec = lm_spec(7);
        let a = cross_validate(&groups, &spec).unwrap();
        let mut shuffled = groups.clone();
        shuffled.reverse();
        shuffled.swap(0, 2);
        let b = cross_validate(&shuffled, &spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn perturbing_a_test_row_leaves_that_folds_model_unchanged() {
        let groups = toy_groups(5, 6, 8);
        let spec = lm_spec(11);
        let base = cross_validate(&groups, &spec).unwrap();

        let mut mutated = groups.clone();
        mutated[2].rows[3].inputs[1] += 321.0;
        mutated[2].rows[3].target += 55.0;
        let changed = cross_validate(&mutated, &spec).unwrap();

        let fold_base = base.folds.iter().find(|f| f.group_id == "g02").unwrap();
        let fold_changed = changed.folds.iter().find(|f| f.group_id == "g02").unwrap();
        assert_eq!(fold_base.fitted.model, fold_changed.fitted.model);
        assert_eq!(fold_base.fitted.normalizer, fold_changed.fitted.normalizer);
        // Folds that trained on the perturbed group must differ.
        let other_base = base.folds.iter().find(|f| f.group_id == "g00").unwrap();
        let other_changed = changed.folds.iter().find(|f| f.group_id == "g00").unwrap();
        assert_ne!(other_base.fitted.model, other_changed.fitted.model);
    }

    #[test]
    fn single_group_cv_is_rejected() {
        let groups = toy_groups(1, 6, 9);
        assert!(matches!(
            cross_validate(&groups, &lm_spec(0)),
            Err(Error::TooFewGroups { got: 1 })
        ));
    }

    #[test]
    fn comparison_sorts_ascending_with_stable_ties() {
        let groups = toy_groups(6, 8, 10);
        let (train, test) = groups.split_at(4);
        let first = ModelSpec {
            label: "lm-a".into(),
            ..lm_spec(3)
        };
        let second = ModelSpec {
            label: "lm-b".into(),
            ..lm_spec(3)
        };
        let grnn = ModelSpec {
            label: "grnn".into(),
            seed: 0,
            config: EstimatorConfig::Grnn { spread: 0.1 },
        };
        let table = compare_models(
            &[first, second, grnn],
            &Protocol::StaticSplit { train, test },
        )
        .unwrap();
        assert_eq!(table.rows.len(), 3);
        assert!(table.rows.windows(2).all(|w| w[0].score <= w[1].score));
        // Identical specs tie and keep input order.
        let a = table.rows.iter().position(|r| r.label == "lm-a").unwrap();
        let b = table.rows.iter().position(|r| r.label == "lm-b").unwrap();
        assert!(a < b);
        let rendered = table.to_string();
        assert!(rendered.contains("test_mse"));
    }

    #[test]
    fn report_aggregates_are_recomputable_from_observations() {
        let groups = toy_groups(6, 8, 12);
        let (train, test) = groups.split_at(4);
        let outcome = static_split_eval(train, test, &lm_spec(2)).unwrap();
        for report in [&outcome.train_report, &outcome.test_report] {
            let p: Vec<f64> = report.observations.iter().map(|o| o.predicted).collect();
            let a: Vec<f64> = report.observations.iter().map(|o| o.actual).collect();
            let again = metrics(&p, &a, &report.target_range).unwrap();
            let rel = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1e-300);
            assert!(rel(again.sse, report.metrics.sse));
            assert!(rel(again.mse_normalized, report.metrics.mse_normalized));
            assert!(rel(again.avg_abs_error, report.metrics.avg_abs_error));
            assert!(rel(again.max_abs_error, report.metrics.max_abs_error));
        }
    }
}
