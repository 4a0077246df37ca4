//! Covariate construction: turns raw condition-monitoring data into
//! network input rows with residual-life targets.
//!
//! Renewal runs yield one row per measurement window with five inputs:
//! elapsed time, the initial load mean and range (operating conditions),
//! and the load-range and temperature deltas from the initial window
//! (condition indicators). Pump histories yield one row per surviving
//! measurement inside a failure-terminated interval, with three, four or
//! five inputs: elapsed time since installation, time since the last
//! failure, the risk variable, and optionally the two bearings' band
//! averages.
//!
//! All transforms here are pure; identical inputs produce identical rows
//! in identical order.

use std::path::Path;

use crate::dataset::{PumpEvent, PumpEventKind, PumpHistory, RenewalRun};
use crate::{Error, Result};

/// Input column names of the renewal covariate set, in order.
pub const RENEWAL_INPUT_NAMES: [&str; 5] = [
    "elapsed_s",
    "load_mean_init_kN",
    "load_range_init_kN",
    "load_range_drop_kN",
    "temp_rise_C",
];

/// Target column name for renewal feature files.
pub const RENEWAL_TARGET_NAME: &str = "residual_life_s";

/// Target column name for pump feature files.
pub const PUMP_TARGET_NAME: &str = "residual_life_days";

const PUMP_ALL_INPUT_NAMES: [&str; 5] = [
    "day",
    "days_since_last_failure",
    "risk",
    "band_avg_brg1",
    "band_avg_brg2",
];

/// Input column names of the pump covariate set for a given arity.
pub fn pump_input_names(n_inputs: usize) -> Result<Vec<&'static str>> {
    if !(3..=5).contains(&n_inputs) {
        return Err(Error::config(format!(
            "pump feature arity must be 3, 4 or 5, got {n_inputs}"
        )));
    }
    Ok(PUMP_ALL_INPUT_NAMES[..n_inputs].to_vec())
}

/// One observation: raw-unit covariates, a non-negative residual-life
/// target, and the provenance needed to group rows back into runs.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    /// Run or pump identifier.
    pub group_id: String,
    /// Observation instant (seconds for renewal rows, days for pumps).
    pub obs_time: f64,
    pub inputs: Vec<f64>,
    pub target: f64,
}

/// Builds the five renewal covariates for every window of a run.
///
/// The load-range delta is encoded as `initial - current`, positive when
/// the load drops, so that both condition indicators grow as the test
/// piece degrades. The target counts down from the failure time.
pub fn renewal_features(run: &RenewalRun) -> Vec<FeatureRow> {
    let first = &run.windows[0];
    run.windows
        .iter()
        .map(|w| FeatureRow {
            group_id: run.run_id.clone(),
            obs_time: w.elapsed_s,
            inputs: vec![
                w.elapsed_s,
                first.load_mean_kn,
                first.load_range_kn,
                first.load_range_kn - w.load_range_kn,
                w.temperature_c - first.temperature_c,
            ],
            target: run.failure_time_s - w.elapsed_s,
        })
        .collect()
}

/// History-dependent risk covariate.
///
/// Before the first failure (`t1` absent) the risk variable is 1. From
/// the first failure on it is `0.5 * (t1 / t)^2`: it drops to one half
/// immediately after the first failure and decays faster for pumps that
/// failed early. Small values mean high risk.
pub fn risk_variable(t: f64, t1: Option<f64>) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::RiskNonPositiveElapsed { t });
    }
    match t1 {
        None => Ok(1.0),
        Some(first) => {
            if !(first > 0.0) || !first.is_finite() {
                return Err(Error::RiskNonPositiveElapsed { t: first });
            }
            if first > t {
                return Err(Error::RiskFirstFailureAfterElapsed { t1: first, t });
            }
            let ratio = first / t;
            Ok(0.5 * ratio * ratio)
        }
    }
}

/// Drops measurements taken during the last week before each failure.
///
/// Readings just ahead of a failure are so large that they distort the
/// normalized inputs, and the aim is longer-term prediction, not failure
/// alarms. The rule applies to failures only: measurements ahead of a
/// suspension are kept, as are the failure and suspension events
/// themselves.
pub fn truncate_last_week(history: &PumpHistory) -> PumpHistory {
    let mut events: Vec<PumpEvent> = Vec::with_capacity(history.events.len());
    let mut pending: Vec<PumpEvent> = Vec::new();
    for e in &history.events {
        match e.kind {
            PumpEventKind::Measurement { .. } => pending.push(e.clone()),
            PumpEventKind::Failure => {
                let cutoff = e.day - 7.0;
                let had_measurements = !pending.is_empty();
                let kept: Vec<PumpEvent> =
                    pending.drain(..).filter(|m| m.day <= cutoff).collect();
                if had_measurements && kept.is_empty() {
                    log::warn!(
                        "pump {}: every measurement before the failure at day {} fell in the \
                         last-week window; that interval contributes no feature rows",
                        history.pump_id,
                        e.day
                    );
                }
                events.extend(kept);
                events.push(e.clone());
            }
            PumpEventKind::Suspension => {
                events.append(&mut pending);
                events.push(e.clone());
            }
        }
    }
    events.append(&mut pending);
    PumpHistory::new(history.pump_id.clone(), events)
        .expect("truncation preserves ordering invariants")
}

/// Builds pump covariate rows from an already-truncated history.
///
/// Only measurements inside an interval that ends in failure produce
/// rows: suspension-terminated intervals carry no failure time, and
/// assigning one would fabricate data. The target is the time from the
/// measurement to the interval's failure.
pub fn pump_features(history: &PumpHistory, n_inputs: usize) -> Result<Vec<FeatureRow>> {
    pump_input_names(n_inputs)?;
    let mut rows = Vec::new();
    let mut pending: Vec<(f64, f64, f64)> = Vec::new();
    let mut first_failure: Option<f64> = None;
    let mut last_failure: Option<f64> = None;

    for e in &history.events {
        match e.kind {
            PumpEventKind::Measurement {
                band_avg_brg1,
                band_avg_brg2,
            } => pending.push((e.day, band_avg_brg1, band_avg_brg2)),
            PumpEventKind::Failure => {
                for (day, b1, b2) in pending.drain(..) {
                    let since_last = match last_failure {
                        Some(f) => day - f,
                        None => day,
                    };
                    let risk = risk_variable(day, first_failure)?;
                    let mut inputs = vec![day, since_last, risk];
                    if n_inputs >= 4 {
                        inputs.push(b1);
                    }
                    if n_inputs >= 5 {
                        inputs.push(b2);
                    }
                    rows.push(FeatureRow {
                        group_id: history.pump_id.clone(),
                        obs_time: day,
                        inputs,
                        target: e.day - day,
                    });
                }
                first_failure = first_failure.or(Some(e.day));
                last_failure = Some(e.day);
            }
            // Censored interval: measurements before a suspension have no
            // failure time and yield no training rows.
            PumpEventKind::Suspension => pending.clear(),
        }
    }
    Ok(rows)
}

/// Writes rows as a feature CSV: `group_id,obs_time,<inputs...>,<target>`.
pub fn save_feature_csv(
    path: impl AsRef<Path>,
    rows: &[FeatureRow],
    input_names: &[&str],
    target_name: &str,
) -> Result<()> {
    let path = path.as_ref();
    let mut wtr = csv::Writer::from_path(path).map_err(|e| Error::MalformedRow {
        line: 0,
        message: e.to_string(),
    })?;
    let mut header = vec!["group_id".to_string(), "obs_time".to_string()];
    header.extend(input_names.iter().map(|s| s.to_string()));
    header.push(target_name.to_string());
    wtr.write_record(&header).map_err(|e| Error::MalformedRow {
        line: 0,
        message: e.to_string(),
    })?;
    for row in rows {
        if row.inputs.len() != input_names.len() {
            return Err(Error::ArityMismatch {
                expected: input_names.len(),
                got: row.inputs.len(),
            });
        }
        let mut record = vec![row.group_id.clone(), format!("{}", row.obs_time)];
        record.extend(row.inputs.iter().map(|v| format!("{v}")));
        record.push(format!("{}", row.target));
        wtr.write_record(&record).map_err(|e| Error::MalformedRow {
            line: 0,
            message: e.to_string(),
        })?;
    }
    wtr.flush()
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(())
}

/// Reads a feature CSV back; returns the rows, the input column names and
/// the target column name. The first two columns are provenance and the
/// last is the target, whatever their headers say in between.
pub fn load_feature_csv(path: impl AsRef<Path>) -> Result<(Vec<FeatureRow>, Vec<String>, String)> {
    let path = path.as_ref();
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::io(
                path.display().to_string(),
                std::io::Error::other(e.to_string()),
            ),
            _ => Error::MalformedRow {
                line: 1,
                message: e.to_string(),
            },
        })?;
    let headers = rdr
        .headers()
        .map_err(|e| Error::MalformedRow {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    if headers.len() < 4 || headers.get(0) != Some("group_id") || headers.get(1) != Some("obs_time")
    {
        return Err(Error::MalformedRow {
            line: 1,
            message: format!(
                "feature CSV header must be group_id,obs_time,<inputs...>,<target>; got {}",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let n_inputs = headers.len() - 3;
    let input_names: Vec<String> = headers.iter().skip(2).take(n_inputs).map(String::from).collect();
    let target_name = headers.iter().last().unwrap_or("target").to_string();

    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::MalformedRow {
            line: 0,
            message: e.to_string(),
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let parse = |idx: usize| -> Result<f64> {
            rec.get(idx)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or(Error::MalformedRow {
                    line,
                    message: format!("cannot parse column {} as a number", headers.get(idx).unwrap_or("?")),
                })
        };
        let group_id = rec
            .get(0)
            .filter(|s| !s.is_empty())
            .ok_or(Error::MalformedRow {
                line,
                message: "empty group_id".into(),
            })?
            .to_string();
        let obs_time = parse(1)?;
        let inputs = (2..2 + n_inputs).map(parse).collect::<Result<Vec<f64>>>()?;
        let target = parse(2 + n_inputs)?;
        rows.push(FeatureRow {
            group_id,
            obs_time,
            inputs,
            target,
        });
    }
    Ok((rows, input_names, target_name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::MeasurementWindow;

    fn window(elapsed: f64, mean: f64, range: f64, temp: f64) -> MeasurementWindow {
        MeasurementWindow {
            elapsed_s: elapsed,
            load_mean_kn: mean,
            load_range_kn: range,
            temperature_c: temp,
        }
    }

    fn sample_run() -> RenewalRun {
        RenewalRun::new(
            "r1",
            vec![
                window(0.0, 210.0, 300.0, 21.5),
                window(1800.0, 210.0, 300.0, 21.7),
                window(3600.0, 205.0, 280.0, 28.0),
            ],
            9000.0,
        )
        .unwrap()
    }

    #[test]
    fn first_window_has_zero_deltas() {
        let rows = renewal_features(&sample_run());
        assert_eq!(rows[0].inputs, vec![0.0, 210.0, 300.0, 0.0, 0.0]);
        assert_eq!(rows[0].target, 9000.0);
    }

    #[test]
    fn target_counts_down_to_failure() {
        let rows = renewal_features(&sample_run());
        assert_eq!(rows[1].target, 9000.0 - 1800.0);
        let mut prev = f64::INFINITY;
        for row in &rows {
            assert!(row.target < prev);
            prev = row.target;
        }
    }

    #[test]
    fn load_drop_is_encoded_positive() {
        let rows = renewal_features(&sample_run());
        // Range decayed from 300 to 280 at the third window.
        assert_eq!(rows[2].inputs[3], 20.0);
        assert!((rows[2].inputs[4] - 6.5).abs() < 1e-12);
    }

    #[test]
    fn risk_variable_matches_closed_form() {
        assert_eq!(risk_variable(100.0, None).unwrap(), 1.0);
        assert_eq!(risk_variable(300.0, Some(300.0)).unwrap(), 0.5);
        assert_eq!(risk_variable(600.0, Some(300.0)).unwrap(), 0.125);
        assert!(risk_variable(0.0, None).is_err());
        assert!(risk_variable(100.0, Some(200.0)).is_err());
    }

    #[test]
    fn risk_is_non_increasing_in_elapsed_time() {
        let mut prev = 1.0;
        for t in (300..2000).step_by(50) {
            let r = risk_variable(t as f64, Some(300.0)).unwrap();
            assert!(r <= prev && r > 0.0 && r <= 1.0);
            prev = r;
        }
    }

    fn measurement(day: f64, b1: f64, b2: f64) -> PumpEvent {
        PumpEvent {
            day,
            kind: PumpEventKind::Measurement {
                band_avg_brg1: b1,
                band_avg_brg2: b2,
            },
        }
    }

    fn terminator(day: f64, failure: bool) -> PumpEvent {
        PumpEvent {
            day,
            kind: if failure {
                PumpEventKind::Failure
            } else {
                PumpEventKind::Suspension
            },
        }
    }

    #[test]
    fn truncation_drops_only_last_week_before_failures() {
        let history = PumpHistory::new(
            "p1",
            vec![
                measurement(390.0, 2.0, 1.9), // 10 days before failure: kept
                measurement(397.0, 2.5, 2.4), // 3 days before failure: dropped
                terminator(400.0, true),
                measurement(517.0, 2.2, 2.0), // 3 days before suspension: kept
                terminator(520.0, false),
            ],
        )
        .unwrap();
        let truncated = truncate_last_week(&history);
        let days: Vec<f64> = truncated.events.iter().map(|e| e.day).collect();
        assert_eq!(days, vec![390.0, 400.0, 517.0, 520.0]);
    }

    #[test]
    fn truncation_keeps_boundary_measurement() {
        let history = PumpHistory::new(
            "p1",
            vec![measurement(393.0, 2.0, 1.9), terminator(400.0, true)],
        )
        .unwrap();
        // Exactly seven days ahead sits outside the open window.
        assert_eq!(truncate_last_week(&history).events.len(), 2);
    }

    #[test]
    fn pump_rows_before_first_failure() {
        let history = PumpHistory::new(
            "p1",
            vec![measurement(100.0, 2.0, 1.8), terminator(400.0, true)],
        )
        .unwrap();
        let rows = pump_features(&history, 3).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].inputs, vec![100.0, 100.0, 1.0]);
        assert_eq!(rows[0].target, 300.0);
    }

    #[test]
    fn pump_rows_after_first_failure_use_risk_and_last_failure() {
        let history = PumpHistory::new(
            "p1",
            vec![
                terminator(300.0, true),
                measurement(600.0, 2.4, 2.2),
                terminator(700.0, true),
            ],
        )
        .unwrap();
        let rows = pump_features(&history, 3).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].inputs, vec![600.0, 300.0, 0.125]);
        assert_eq!(rows[0].target, 100.0);
    }

    #[test]
    fn five_input_mode_appends_bearing_bands_in_order() {
        let history = PumpHistory::new(
            "p1",
            vec![measurement(100.0, 2.25, 1.75), terminator(400.0, true)],
        )
        .unwrap();
        let rows = pump_features(&history, 5).unwrap();
        assert_eq!(rows[0].inputs, vec![100.0, 100.0, 1.0, 2.25, 1.75]);
        let rows4 = pump_features(&history, 4).unwrap();
        assert_eq!(rows4[0].inputs, vec![100.0, 100.0, 1.0, 2.25]);
        assert!(pump_features(&history, 6).is_err());
    }

    #[test]
    fn suspension_intervals_yield_no_rows() {
        let history = PumpHistory::new(
            "p1",
            vec![
                measurement(100.0, 2.0, 1.8),
                terminator(200.0, false),
                measurement(250.0, 2.1, 1.9),
                terminator(400.0, true),
            ],
        )
        .unwrap();
        let rows = pump_features(&history, 3).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].obs_time, 250.0);
        // Time since last *failure* is unaffected by the suspension.
        assert_eq!(rows[0].inputs[1], 250.0);
    }

    #[test]
    fn feature_csv_round_trips() {
        let rows = renewal_features(&sample_run());
        let tmp = tempfile::NamedTempFile::new().unwrap();
        let names: Vec<&str> = RENEWAL_INPUT_NAMES.to_vec();
        save_feature_csv(tmp.path(), &rows, &names, RENEWAL_TARGET_NAME).unwrap();
        let (back, input_names, target_name) = load_feature_csv(tmp.path()).unwrap();
        assert_eq!(back, rows);
        assert_eq!(input_names, RENEWAL_INPUT_NAMES.to_vec());
        assert_eq!(target_name, RENEWAL_TARGET_NAME);
    }
}
