//! CSV schemas for the two dataset shapes.
//!
//! Renewal files: header `run_id,elapsed_s,load_mean_kN,load_range_kN,
//! temperature_C` with optional trailing `accel_rms,strain_range` columns
//! (accepted, ignored), one window per row, and one trailer row per run of
//! the form `run_id,FAILURE,<failure_time_s>,,`.
//!
//! Pump files: header `pump_id,day,kind,band_avg_brg1,band_avg_brg2` where
//! `kind` is one of measurement/failure/suspension and the band columns are
//! empty unless the row is a measurement.
//!
//! Writers are canonical: UTF-8, `.` decimal separator, LF line endings,
//! rows sorted by (id, time), floats rendered in the shortest form that
//! parses back to the same bits. Parsing a canonical file and re-writing it
//! reproduces the input byte for byte.

use std::collections::BTreeMap;
use std::path::Path;

use super::{MeasurementWindow, PumpEvent, PumpEventKind, PumpHistory, RenewalRun};
use crate::{Error, Result};

const RENEWAL_COLUMNS: [&str; 5] = [
    "run_id",
    "elapsed_s",
    "load_mean_kN",
    "load_range_kN",
    "temperature_C",
];
const RENEWAL_OPTIONAL: [&str; 2] = ["accel_rms", "strain_range"];
const PUMP_COLUMNS: [&str; 5] = ["pump_id", "day", "kind", "band_avg_brg1", "band_avg_brg2"];

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::io(path.display().to_string(), io_of(e)),
            _ => Error::MalformedRow {
                line: 1,
                message: e.to_string(),
            },
        })
}

fn io_of(e: csv::Error) -> std::io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => io,
        other => std::io::Error::other(format!("{other:?}")),
    }
}

fn parse_field(record: &csv::StringRecord, idx: usize, name: &str, line: u64) -> Result<f64> {
    let raw = record.get(idx).ok_or(Error::MalformedRow {
        line,
        message: format!("missing column {name}"),
    })?;
    raw.trim().parse::<f64>().map_err(|_| Error::MalformedRow {
        line,
        message: format!("column {name}: cannot parse {raw:?} as a number"),
    })
}

fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

/// Loads a renewal CSV; runs come back sorted by `run_id`, windows by
/// `elapsed_s`. Optional accelerometer/strain columns are accepted and
/// ignored: the network inputs use only load and temperature.
pub fn load_renewal_runs(path: impl AsRef<Path>) -> Result<Vec<RenewalRun>> {
    let path = path.as_ref();
    let mut rdr = reader(path)?;

    let headers = rdr
        .headers()
        .map_err(|e| Error::MalformedRow {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let cols: Vec<&str> = headers.iter().collect();
    let valid = cols.len() >= RENEWAL_COLUMNS.len()
        && cols[..RENEWAL_COLUMNS.len()] == RENEWAL_COLUMNS
        && cols[RENEWAL_COLUMNS.len()..]
            .iter()
            .zip(RENEWAL_OPTIONAL.iter())
            .all(|(a, b)| a == b)
        && cols.len() <= RENEWAL_COLUMNS.len() + RENEWAL_OPTIONAL.len();
    if !valid {
        return Err(Error::MalformedRow {
            line: 1,
            message: format!(
                "renewal header must start with {} (optional: {}), got {}",
                RENEWAL_COLUMNS.join(","),
                RENEWAL_OPTIONAL.join(","),
                cols.join(",")
            ),
        });
    }

    struct Partial {
        windows: Vec<MeasurementWindow>,
        failure: Option<f64>,
    }
    let mut runs: BTreeMap<String, Partial> = BTreeMap::new();

    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::MalformedRow {
            line: 0,
            message: e.to_string(),
        })?;
        let line = record_line(&rec);
        let run_id = rec
            .get(0)
            .ok_or(Error::MalformedRow {
                line,
                message: "missing run_id".into(),
            })?
            .to_string();
        if run_id.is_empty() {
            return Err(Error::MalformedRow {
                line,
                message: "empty run_id".into(),
            });
        }

        if rec.get(1) == Some("FAILURE") {
            let t = parse_field(&rec, 2, "failure_time_s", line)?;
            let partial = runs.get_mut(&run_id).ok_or_else(|| Error::MalformedRow {
                line,
                message: format!("FAILURE trailer for run {run_id} before any window row"),
            })?;
            if partial.failure.is_some() {
                return Err(Error::MalformedRow {
                    line,
                    message: format!("duplicate FAILURE trailer for run {run_id}"),
                });
            }
            partial.failure = Some(t);
            continue;
        }

        let elapsed = parse_field(&rec, 1, "elapsed_s", line)?;
        let window = MeasurementWindow {
            elapsed_s: elapsed,
            load_mean_kn: parse_field(&rec, 2, "load_mean_kN", line)?,
            load_range_kn: parse_field(&rec, 3, "load_range_kN", line)?,
            temperature_c: parse_field(&rec, 4, "temperature_C", line)?,
        };
        let partial = runs.entry(run_id.clone()).or_insert(Partial {
            windows: Vec::new(),
            failure: None,
        });
        if partial.failure.is_some() {
            return Err(Error::MalformedRow {
                line,
                message: format!("window row for run {run_id} after its FAILURE trailer"),
            });
        }
        if let Some(prev) = partial.windows.last() {
            if window.elapsed_s <= prev.elapsed_s {
                return Err(Error::NonMonotonic {
                    group: run_id,
                    line,
                    prev: prev.elapsed_s,
                    at: window.elapsed_s,
                });
            }
        }
        partial.windows.push(window);
    }

    runs.into_iter()
        .map(|(run_id, partial)| {
            let failure = partial.failure.ok_or(Error::MissingFailureTrailer {
                run: run_id.clone(),
            })?;
            RenewalRun::new(run_id, partial.windows, failure)
        })
        .collect()
}

/// Writes a renewal CSV in canonical form (see module docs).
pub fn save_renewal_runs(path: impl AsRef<Path>, runs: &[RenewalRun]) -> Result<()> {
    let path = path.as_ref();
    let mut sorted: Vec<&RenewalRun> = runs.iter().collect();
    sorted.sort_by(|a, b| a.run_id.cmp(&b.run_id));

    let mut wtr = csv::Writer::from_path(path)
        .map_err(|e| Error::io(path.display().to_string(), io_of(e)))?;
    let write = |wtr: &mut csv::Writer<std::fs::File>, fields: &[String]| {
        wtr.write_record(fields).map_err(|e| Error::MalformedRow {
            line: 0,
            message: e.to_string(),
        })
    };

    write(&mut wtr, &RENEWAL_COLUMNS.map(String::from))?;
    for run in sorted {
        for w in &run.windows {
            write(
                &mut wtr,
                &[
                    run.run_id.clone(),
                    format!("{}", w.elapsed_s),
                    format!("{}", w.load_mean_kn),
                    format!("{}", w.load_range_kn),
                    format!("{}", w.temperature_c),
                ],
            )?;
        }
        write(
            &mut wtr,
            &[
                run.run_id.clone(),
                "FAILURE".into(),
                format!("{}", run.failure_time_s),
                String::new(),
                String::new(),
            ],
        )?;
    }
    wtr.flush()
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(())
}

/// Loads a pump CSV; histories come back sorted by `pump_id`, events by day.
pub fn load_pump_histories(path: impl AsRef<Path>) -> Result<Vec<PumpHistory>> {
    let path = path.as_ref();
    let mut rdr = reader(path)?;

    let headers = rdr
        .headers()
        .map_err(|e| Error::MalformedRow {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let cols: Vec<&str> = headers.iter().collect();
    if cols != PUMP_COLUMNS {
        return Err(Error::MalformedRow {
            line: 1,
            message: format!(
                "pump header must be {}, got {}",
                PUMP_COLUMNS.join(","),
                cols.join(",")
            ),
        });
    }

    let mut pumps: BTreeMap<String, Vec<PumpEvent>> = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::MalformedRow {
            line: 0,
            message: e.to_string(),
        })?;
        let line = record_line(&rec);
        let pump_id = rec
            .get(0)
            .filter(|s| !s.is_empty())
            .ok_or(Error::MalformedRow {
                line,
                message: "empty pump_id".into(),
            })?
            .to_string();
        let day = parse_field(&rec, 1, "day", line)?;
        if day < 0.0 {
            return Err(Error::MalformedRow {
                line,
                message: format!("day {day} is negative"),
            });
        }
        let kind_raw = rec.get(2).unwrap_or("");
        let band1 = rec.get(3).unwrap_or("").trim();
        let band2 = rec.get(4).unwrap_or("").trim();
        let kind = match kind_raw {
            "measurement" => PumpEventKind::Measurement {
                band_avg_brg1: parse_field(&rec, 3, "band_avg_brg1", line)?,
                band_avg_brg2: parse_field(&rec, 4, "band_avg_brg2", line)?,
            },
            "failure" | "suspension" => {
                if !band1.is_empty() || !band2.is_empty() {
                    return Err(Error::MalformedRow {
                        line,
                        message: format!("{kind_raw} rows must not carry band averages"),
                    });
                }
                if kind_raw == "failure" {
                    PumpEventKind::Failure
                } else {
                    PumpEventKind::Suspension
                }
            }
            other => {
                return Err(Error::MalformedRow {
                    line,
                    message: format!(
                        "kind must be measurement, failure or suspension, got {other:?}"
                    ),
                });
            }
        };

        let events = pumps.entry(pump_id.clone()).or_default();
        if let Some(prev) = events.last() {
            if day <= prev.day {
                return Err(Error::NonMonotonic {
                    group: pump_id,
                    line,
                    prev: prev.day,
                    at: day,
                });
            }
        }
        events.push(PumpEvent { day, kind });
    }

    pumps
        .into_iter()
        .map(|(pump_id, events)| PumpHistory::new(pump_id, events))
        .collect()
}

/// Writes a pump CSV in canonical form (see module docs).
pub fn save_pump_histories(path: impl AsRef<Path>, histories: &[PumpHistory]) -> Result<()> {
    let path = path.as_ref();
    let mut sorted: Vec<&PumpHistory> = histories.iter().collect();
    sorted.sort_by(|a, b| a.pump_id.cmp(&b.pump_id));

    let mut wtr = csv::Writer::from_path(path)
        .map_err(|e| Error::io(path.display().to_string(), io_of(e)))?;
    wtr.write_record(PUMP_COLUMNS)
        .map_err(|e| Error::MalformedRow {
            line: 0,
            message: e.to_string(),
        })?;
    for pump in sorted {
        for e in &pump.events {
            let (b1, b2) = match e.kind {
                PumpEventKind::Measurement {
                    band_avg_brg1,
                    band_avg_brg2,
                } => (format!("{band_avg_brg1}"), format!("{band_avg_brg2}")),
                _ => (String::new(), String::new()),
            };
            wtr.write_record([
                pump.pump_id.as_str(),
                &format!("{}", e.day),
                e.kind.label(),
                &b1,
                &b2,
            ])
            .map_err(|err| Error::MalformedRow {
                line: 0,
                message: err.to_string(),
            })?;
        }
    }
    wtr.flush()
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(())
}
