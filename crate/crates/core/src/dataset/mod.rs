//! Data model for the two dataset shapes, CSV ingestion/serialization, and
//! min-max normalization.
//!
//! A *renewal* dataset holds one run per test piece: a dense sequence of
//! measurement windows on a 180 s grid plus the failure time. A *pump*
//! dataset holds one sparse, chronologically ordered event history per
//! pump, mixing vibration measurements with failures and suspensions.
//!
//! All types are immutable after construction and safe to share read-only
//! across threads.

mod io;

pub use io::{load_pump_histories, load_renewal_runs, save_pump_histories, save_renewal_runs};

use crate::{Error, Result};

/// Nominal spacing of renewal measurement windows, in seconds.
pub const WINDOW_SPACING_S: f64 = 180.0;

/// Summary statistics of one three-second recording window.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementWindow {
    /// Seconds since the start of the run.
    pub elapsed_s: f64,
    /// Mean applied load over the window, kN.
    pub load_mean_kn: f64,
    /// Peak-to-peak applied load over the window, kN.
    pub load_range_kn: f64,
    /// Test piece surface temperature, degrees Celsius.
    pub temperature_c: f64,
}

/// One fatigue test piece: its window sequence and failure time.
///
/// The failure time is the first measurement instant after failure, so it
/// is always at or after the last recorded window.
#[derive(Debug, Clone, PartialEq)]
pub struct RenewalRun {
    pub run_id: String,
    pub windows: Vec<MeasurementWindow>,
    pub failure_time_s: f64,
}

impl RenewalRun {
    /// Builds a run, enforcing the ordering and failure-time invariants.
    pub fn new(
        run_id: impl Into<String>,
        windows: Vec<MeasurementWindow>,
        failure_time_s: f64,
    ) -> Result<Self> {
        let run_id = run_id.into();
        if windows.is_empty() {
            return Err(Error::InvalidRecord {
                group: run_id,
                message: "a run needs at least one measurement window".into(),
            });
        }
        for (i, w) in windows.iter().enumerate() {
            if !(w.elapsed_s >= 0.0 && w.load_range_kn >= 0.0) {
                return Err(Error::InvalidRecord {
                    group: run_id,
                    message: format!(
                        "window {i}: elapsed_s and load_range_kN must be non-negative"
                    ),
                });
            }
            if i > 0 && w.elapsed_s <= windows[i - 1].elapsed_s {
                return Err(Error::InvalidRecord {
                    group: run_id,
                    message: format!(
                        "windows must be strictly increasing in elapsed_s ({} after {})",
                        w.elapsed_s,
                        windows[i - 1].elapsed_s
                    ),
                });
            }
        }
        let last = windows.last().expect("non-empty").elapsed_s;
        if failure_time_s < last {
            return Err(Error::InvalidRecord {
                group: run_id,
                message: format!(
                    "failure_time_s {failure_time_s} precedes the last window at {last}"
                ),
            });
        }
        Ok(Self {
            run_id,
            windows,
            failure_time_s,
        })
    }
}

/// What happened at a pump event instant.
///
/// Band averages exist only on measurements, so failures and suspensions
/// cannot carry them by construction.
#[derive(Debug, Clone, PartialEq)]
pub enum PumpEventKind {
    /// Vibration reading: average amplitude in the monitored frequency
    /// band, one value per bearing.
    Measurement {
        band_avg_brg1: f64,
        band_avg_brg2: f64,
    },
    Failure,
    Suspension,
}

impl PumpEventKind {
    pub fn label(&self) -> &'static str {
        match self {
            PumpEventKind::Measurement { .. } => "measurement",
            PumpEventKind::Failure => "failure",
            PumpEventKind::Suspension => "suspension",
        }
    }
}

/// One entry in a pump's history.
#[derive(Debug, Clone, PartialEq)]
pub struct PumpEvent {
    /// Days since initial installation.
    pub day: f64,
    pub kind: PumpEventKind,
}

/// One pump's sparse, chronologically ordered event history.
#[derive(Debug, Clone, PartialEq)]
pub struct PumpHistory {
    pub pump_id: String,
    pub events: Vec<PumpEvent>,
}

impl PumpHistory {
    /// Builds a history, enforcing ordering and band-average invariants.
    pub fn new(pump_id: impl Into<String>, events: Vec<PumpEvent>) -> Result<Self> {
        let pump_id = pump_id.into();
        for (i, e) in events.iter().enumerate() {
            if e.day < 0.0 {
                return Err(Error::InvalidRecord {
                    group: pump_id,
                    message: format!("event {i}: day {} is negative", e.day),
                });
            }
            if i > 0 && e.day <= events[i - 1].day {
                return Err(Error::InvalidRecord {
                    group: pump_id,
                    message: format!(
                        "events must be strictly increasing in day ({} after {})",
                        e.day,
                        events[i - 1].day
                    ),
                });
            }
            if let PumpEventKind::Measurement {
                band_avg_brg1,
                band_avg_brg2,
            } = e.kind
            {
                if band_avg_brg1 < 0.0 || band_avg_brg2 < 0.0 {
                    return Err(Error::InvalidRecord {
                        group: pump_id,
                        message: format!("event {i}: band averages must be non-negative"),
                    });
                }
            }
        }
        Ok(Self { pump_id, events })
    }
}

/// Per-column (min, max) pair of a fitted [`Normalizer`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnRange {
    pub min: f64,
    pub max: f64,
}

impl ColumnRange {
    /// Maps `x` linearly so that min -> 0 and max -> 1. Values outside the
    /// fitted range extrapolate; they are deliberately not clamped.
    pub fn normalize(&self, x: f64) -> f64 {
        (x - self.min) / (self.max - self.min)
    }

    /// Inverse of [`ColumnRange::normalize`].
    pub fn denormalize(&self, x: f64) -> f64 {
        self.min + x * (self.max - self.min)
    }
}

/// Column-wise min-max scaler fitted on training data only.
///
/// Test rows may fall outside the fitted ranges and are mapped by
/// extrapolation: clamping would silently corrupt the condition-delta
/// covariates the networks rely on.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalizer {
    ranges: Vec<ColumnRange>,
}

impl Normalizer {
    /// Fits per-column ranges over a row-major matrix.
    ///
    /// Needs at least two rows, equal arity throughout, finite values, and
    /// a non-degenerate spread in every column.
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::TooFewSamples {
                need: 2,
                got: rows.len(),
            });
        }
        let arity = rows[0].len();
        let mut ranges = vec![
            ColumnRange {
                min: f64::INFINITY,
                max: f64::NEG_INFINITY,
            };
            arity
        ];
        for row in rows {
            if row.len() != arity {
                return Err(Error::ArityMismatch {
                    expected: arity,
                    got: row.len(),
                });
            }
            for (i, &x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(Error::NonFiniteInput { index: i });
                }
                ranges[i].min = ranges[i].min.min(x);
                ranges[i].max = ranges[i].max.max(x);
            }
        }
        for (i, r) in ranges.iter().enumerate() {
            if r.max <= r.min {
                return Err(Error::ConstantColumn {
                    column: format!("{i}"),
                    value: r.min,
                });
            }
        }
        Ok(Self { ranges })
    }

    pub fn arity(&self) -> usize {
        self.ranges.len()
    }

    pub fn ranges(&self) -> &[ColumnRange] {
        &self.ranges
    }

    /// Builds a normalizer directly from stored ranges (model files).
    pub fn from_ranges(ranges: Vec<ColumnRange>) -> Result<Self> {
        for (i, r) in ranges.iter().enumerate() {
            if !(r.max > r.min) || !r.min.is_finite() || !r.max.is_finite() {
                return Err(Error::ConstantColumn {
                    column: format!("{i}"),
                    value: r.min,
                });
            }
        }
        Ok(Self { ranges })
    }

    /// Maps a raw row to normalized coordinates.
    pub fn normalize(&self, row: &[f64]) -> Result<Vec<f64>> {
        self.check_arity(row)?;
        Ok(row
            .iter()
            .zip(&self.ranges)
            .map(|(&x, r)| r.normalize(x))
            .collect())
    }

    /// Maps a normalized row back to raw coordinates.
    pub fn denormalize(&self, row: &[f64]) -> Result<Vec<f64>> {
        self.check_arity(row)?;
        Ok(row
            .iter()
            .zip(&self.ranges)
            .map(|(&x, r)| r.denormalize(x))
            .collect())
    }

    fn check_arity(&self, row: &[f64]) -> Result<()> {
        if row.len() != self.ranges.len() {
            return Err(Error::ArityMismatch {
                expected: self.ranges.len(),
                got: row.len(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(cols: &[&[f64]]) -> Vec<Vec<f64>> {
        let rows = cols[0].len();
        (0..rows)
            .map(|r| cols.iter().map(|c| c[r]).collect())
            .collect()
    }

    #[test]
    fn fit_stores_column_min_max() {
        let n = Normalizer::fit(&matrix(&[&[2.0, 4.0, 6.0]])).unwrap();
        assert_eq!(n.ranges()[0], ColumnRange { min: 2.0, max: 6.0 });
    }

    #[test]
    fn fit_rejects_constant_column() {
        let err = Normalizer::fit(&matrix(&[&[5.0, 5.0, 5.0]])).unwrap_err();
        match err {
            Error::ConstantColumn { column, value } => {
                assert_eq!(column, "0");
                assert_eq!(value, 5.0);
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn fit_two_columns() {
        let n = Normalizer::fit(&matrix(&[&[0.0, 10.0], &[-1.0, 1.0]])).unwrap();
        assert_eq!(n.ranges()[0], ColumnRange { min: 0.0, max: 10.0 });
        assert_eq!(n.ranges()[1], ColumnRange { min: -1.0, max: 1.0 });
    }

    #[test]
    fn normalize_endpoint_and_extrapolation() {
        let n = Normalizer::fit(&matrix(&[&[0.0, 10.0]])).unwrap();
        assert_eq!(n.normalize(&[10.0]).unwrap()[0], 1.0);
        assert_eq!(n.normalize(&[0.0]).unwrap()[0], 0.0);
        // Out-of-range values extrapolate, no clamping.
        assert_eq!(n.normalize(&[12.0]).unwrap()[0], 1.2);
    }

    #[test]
    fn round_trip_identity() {
        let n = Normalizer::fit(&matrix(&[&[2.0, 6.0]])).unwrap();
        let x = 3.7;
        let back = n.denormalize(&n.normalize(&[x]).unwrap()).unwrap()[0];
        assert!((back - x).abs() <= 1e-12 * x.abs());
    }

    #[test]
    fn arity_mismatch_is_rejected() {
        let n = Normalizer::fit(&matrix(&[&[0.0, 1.0], &[0.0, 1.0]])).unwrap();
        assert!(matches!(
            n.normalize(&[0.5]),
            Err(Error::ArityMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn renewal_run_rejects_failure_before_last_window() {
        let windows = vec![
            MeasurementWindow {
                elapsed_s: 0.0,
                load_mean_kn: 200.0,
                load_range_kn: 300.0,
                temperature_c: 22.0,
            },
            MeasurementWindow {
                elapsed_s: 180.0,
                load_mean_kn: 200.0,
                load_range_kn: 300.0,
                temperature_c: 22.0,
            },
        ];
        assert!(RenewalRun::new("r1", windows, 100.0).is_err());
    }

    #[test]
    fn pump_history_rejects_day_regression() {
        let events = vec![
            PumpEvent {
                day: 10.0,
                kind: PumpEventKind::Failure,
            },
            PumpEvent {
                day: 10.0,
                kind: PumpEventKind::Suspension,
            },
        ];
        assert!(PumpHistory::new("p1", events).is_err());
    }
}
