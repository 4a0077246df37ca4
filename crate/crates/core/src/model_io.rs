//! Versioned plain-text serialization for trained estimators.
//!
//! Layout line first, then row-major weight matrices. Floats are rendered
//! with 17 significant decimal digits, which round-trips every finite
//! 64-bit value bit for bit. A `kind` tag distinguishes the estimator
//! families; the fitted input/target normalizer travels with the model so
//! that a loaded model can predict in physical units.

use std::fmt::Write as _;
use std::path::Path;

use crate::dataset::{ColumnRange, Normalizer};
use crate::grnn::GrnnModel;
use crate::mlp::{MlpLayout, MlpModel, Transfer};
use crate::weibull::WeibullModel;
use crate::{Error, Result};

const MAGIC: &str = "reslife-model";
const VERSION: &str = "v1";

/// A trained estimator plus the normalizer it was fitted alongside.
///
/// The normalizer covers the input columns followed by the target column.
/// Network models cannot predict without one; the Weibull baseline works
/// in physical units directly, so a standalone Weibull fit may omit it.
#[derive(Debug, Clone, PartialEq)]
pub struct SavedModel {
    pub estimator: SavedEstimator,
    pub normalizer: Option<Normalizer>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SavedEstimator {
    Mlp(MlpModel),
    Grnn(GrnnModel),
    Weibull(WeibullModel),
}

impl SavedEstimator {
    pub fn kind(&self) -> &'static str {
        match self {
            SavedEstimator::Mlp(_) => "mlp",
            SavedEstimator::Grnn(_) => "grnn",
            SavedEstimator::Weibull(_) => "weibull",
        }
    }
}

/// Renders with 17 significant digits; parses back to identical bits.
fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn render_row(out: &mut String, row: &[f64]) {
    for (i, v) in row.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{}", fmt17(*v));
    }
    out.push('\n');
}

/// Serializes a model to its plain-text form.
pub fn render_model(model: &SavedModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let _ = writeln!(out, "kind {}", model.estimator.kind());
    match &model.estimator {
        SavedEstimator::Mlp(m) => {
            let _ = writeln!(
                out,
                "layout {} {} {}",
                m.layout.n_inputs,
                m.layout.n_hidden,
                m.layout.output_transfer.label()
            );
            let _ = writeln!(
                out,
                "hidden_weights {} {}",
                m.layout.n_hidden,
                m.layout.n_inputs + 1
            );
            for row in &m.hidden_weights {
                render_row(&mut out, row);
            }
            let _ = writeln!(out, "output_weights 1 {}", m.layout.n_hidden + 1);
            render_row(&mut out, &m.output_weights);
        }
        SavedEstimator::Grnn(g) => {
            let _ = writeln!(out, "spread {}", fmt17(g.spread()));
            let _ = writeln!(out, "centers {} {}", g.len(), g.arity());
            for row in g.centers() {
                render_row(&mut out, row);
            }
            let _ = writeln!(out, "targets {}", g.len());
            render_row(&mut out, g.targets());
        }
        SavedEstimator::Weibull(w) => {
            let _ = writeln!(out, "weibull {} {}", fmt17(w.beta), fmt17(w.eta));
        }
    }
    if let Some(normalizer) = &model.normalizer {
        let _ = writeln!(out, "normalizer {}", normalizer.arity());
        for r in normalizer.ranges() {
            render_row(&mut out, &[r.min, r.max]);
        }
    }
    out.push_str("end\n");
    out
}

pub fn save_model(path: impl AsRef<Path>, model: &SavedModel) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, render_model(model))
        .map_err(|e| Error::io(path.display().to_string(), e))
}

struct Lines<'a> {
    path: &'a str,
    iter: std::str::Lines<'a>,
    line_no: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str> {
        self.line_no += 1;
        self.iter.next().ok_or_else(|| Error::InvalidModelFile {
            path: self.path.to_string(),
            message: format!("unexpected end of file at line {}", self.line_no),
        })
    }

    fn fail(&self, message: impl Into<String>) -> Error {
        Error::InvalidModelFile {
            path: self.path.to_string(),
            message: format!("line {}: {}", self.line_no, message.into()),
        }
    }

    fn expect_tag(&mut self, tag: &str) -> Result<Vec<&'a str>> {
        let line = self.next()?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(tag) {
            return Err(self.fail(format!("expected {tag:?}, got {line:?}")));
        }
        Ok(parts.collect())
    }

    fn floats(&mut self, n: usize) -> Result<Vec<f64>> {
        let line = self.next()?;
        let values: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| self.fail(format!("bad float: {e}")))?;
        if values.len() != n {
            return Err(self.fail(format!("expected {n} values, got {}", values.len())));
        }
        Ok(values)
    }
}

fn parse_count(lines: &Lines, token: Option<&str>, what: &str) -> Result<usize> {
    token
        .and_then(|t| t.parse::<usize>().ok())
        .ok_or_else(|| lines.fail(format!("missing or invalid {what}")))
}

/// Parses the plain-text model form.
pub fn parse_model(path: &str, text: &str) -> Result<SavedModel> {
    let mut lines = Lines {
        path,
        iter: text.lines(),
        line_no: 0,
    };

    let header = lines.next()?;
    if header != format!("{MAGIC} {VERSION}") {
        return Err(lines.fail(format!(
            "expected header {MAGIC:?} {VERSION:?}, got {header:?}"
        )));
    }
    let kind_parts = lines.expect_tag("kind")?;
    let kind = *kind_parts.first().ok_or_else(|| lines.fail("missing kind"))?;

    let estimator = match kind {
        "mlp" => {
            let layout_parts = lines.expect_tag("layout")?;
            if layout_parts.len() != 3 {
                return Err(lines.fail("layout needs <n_inputs> <n_hidden> <transfer>"));
            }
            let n_inputs = parse_count(&lines, layout_parts.first().copied(), "n_inputs")?;
            let n_hidden = parse_count(&lines, layout_parts.get(1).copied(), "n_hidden")?;
            let transfer = Transfer::parse(layout_parts[2])?;
            let layout = MlpLayout::new(n_inputs, n_hidden, transfer)?;

            let dims = lines.expect_tag("hidden_weights")?;
            let rows = parse_count(&lines, dims.first().copied(), "hidden row count")?;
            let cols = parse_count(&lines, dims.get(1).copied(), "hidden column count")?;
            if rows != n_hidden || cols != n_inputs + 1 {
                return Err(lines.fail("hidden_weights dimensions do not match the layout"));
            }
            let hidden_weights = (0..rows)
                .map(|_| lines.floats(cols))
                .collect::<Result<Vec<_>>>()?;

            let dims = lines.expect_tag("output_weights")?;
            let cols = parse_count(&lines, dims.get(1).copied(), "output column count")?;
            if cols != n_hidden + 1 {
                return Err(lines.fail("output_weights dimensions do not match the layout"));
            }
            let output_weights = lines.floats(cols)?;
            SavedEstimator::Mlp(MlpModel {
                layout,
                hidden_weights,
                output_weights,
            })
        }
        "grnn" => {
            let spread_parts = lines.expect_tag("spread")?;
            let spread: f64 = spread_parts
                .first()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| lines.fail("missing spread value"))?;
            let dims = lines.expect_tag("centers")?;
            let n = parse_count(&lines, dims.first().copied(), "center count")?;
            let d = parse_count(&lines, dims.get(1).copied(), "center arity")?;
            let centers = (0..n)
                .map(|_| lines.floats(d))
                .collect::<Result<Vec<_>>>()?;
            let dims = lines.expect_tag("targets")?;
            let n_t = parse_count(&lines, dims.first().copied(), "target count")?;
            if n_t != n {
                return Err(lines.fail("target count does not match center count"));
            }
            let targets = lines.floats(n)?;
            SavedEstimator::Grnn(GrnnModel::from_parts(centers, targets, spread)?)
        }
        "weibull" => {
            let parts = lines.expect_tag("weibull")?;
            let beta: f64 = parts
                .first()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| lines.fail("missing beta"))?;
            let eta: f64 = parts
                .get(1)
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| lines.fail("missing eta"))?;
            SavedEstimator::Weibull(WeibullModel::new(beta, eta)?)
        }
        other => {
            return Err(lines.fail(format!("unknown model kind {other:?}")));
        }
    };

    let dims = lines.expect_tag("normalizer")?;
    let n_cols = parse_count(&lines, dims.first().copied(), "normalizer column count")?;
    let ranges = (0..n_cols)
        .map(|_| {
            let pair = lines.floats(2)?;
            Ok(ColumnRange {
                min: pair[0],
                max: pair[1],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let normalizer = Normalizer::from_ranges(ranges)?;

    let end = lines.next()?;
    if end != "end" {
        return Err(lines.fail(format!("expected trailing \"end\", got {end:?}")));
    }

    Ok(SavedModel {
        estimator,
        normalizer,
    })
}

pub fn load_model(path: impl AsRef<Path>) -> Result<SavedModel> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_model(&path.display().to_string(), &text)
}
