//! Report files: per-observation CSVs, plot-ready CSVs, and aggregate
//! text tables. All output is stable and line-oriented for scripting.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use reslife_core::eval::{CvReport, EvalReport, Observation};

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))
}

fn write_rows(
    path: &Path,
    header: &[&str],
    observations: &[&Observation],
    with_error: bool,
) -> Result<()> {
    let mut wtr = writer(path)?;
    wtr.write_record(header)?;
    for o in observations {
        let mut record = vec![
            o.group_id.clone(),
            format!("{}", o.obs_time),
            format!("{}", o.predicted),
            format!("{}", o.actual),
        ];
        if with_error {
            record.push(format!("{}", o.error()));
        }
        wtr.write_record(&record)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Per-observation predictions with errors, in report order.
pub fn write_predictions_csv(path: &Path, observations: &[Observation]) -> Result<()> {
    if observations.is_empty() {
        bail!("reports require at least one observation");
    }
    let refs: Vec<&Observation> = observations.iter().collect();
    write_rows(
        path,
        &["group_id", "obs_time", "predicted", "actual", "error"],
        &refs,
        true,
    )
}

/// Plot-ready data: observation time versus predicted and actual residual
/// life, sorted by (group, time) so each run plots as one curve.
pub fn write_plot_csv(path: &Path, observations: &[Observation]) -> Result<()> {
    if observations.is_empty() {
        bail!("reports require at least one observation");
    }
    let mut refs: Vec<&Observation> = observations.iter().collect();
    refs.sort_by(|a, b| {
        a.group_id
            .cmp(&b.group_id)
            .then(a.obs_time.partial_cmp(&b.obs_time).expect("finite times"))
    });
    write_rows(
        path,
        &["group_id", "obs_time", "predicted", "actual"],
        &refs,
        false,
    )
}

/// Stable text rendering of one report's aggregates.
pub fn summary_section(title: &str, report: &EvalReport) -> String {
    let m = &report.metrics;
    let mut out = String::new();
    let _ = writeln!(out, "[{title}]");
    let _ = writeln!(out, "observations: {}", report.observations.len());
    let _ = writeln!(out, "mse_normalized: {:.6e}", m.mse_normalized);
    let _ = writeln!(out, "avg_abs_error: {:.6e}", m.avg_abs_error);
    let _ = writeln!(out, "max_abs_error: {:.6e}", m.max_abs_error);
    let _ = writeln!(out, "sse: {:.6e}", m.sse);
    out
}

/// Per-fold aggregates plus the total SSE line the comparisons rank by.
pub fn cv_summary(report: &CvReport) -> String {
    let mut out = String::new();
    for fold in &report.folds {
        out.push_str(&summary_section(
            &format!("fold test={}", fold.group_id),
            &fold.test_report,
        ));
        out.push('\n');
    }
    let _ = writeln!(out, "total_sse: {:.6e}", report.total_sse);
    out
}

/// Writes the per-observation CSV and plot CSV for one report; returns
/// the file names written.
pub fn emit_report_files(
    report: &EvalReport,
    out_dir: &Path,
    prefix: &str,
) -> Result<Vec<String>> {
    let predictions = format!("{prefix}predictions.csv");
    let plot = format!("{prefix}plot.csv");
    write_predictions_csv(&out_dir.join(&predictions), &report.observations)?;
    write_plot_csv(&out_dir.join(&plot), &report.observations)?;
    Ok(vec![predictions, plot])
}
