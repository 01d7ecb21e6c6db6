use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::biharmonic::{Criterion, Residual};

use super::{CliError, Format, EXIT_NUMERICAL, EXIT_OK, EXIT_VERDICT};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Biharmonic,
    ProperBiharmonic,
    NotBiharmonic,
    /// Some grid point could not be evaluated.
    Error,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Biharmonic => "biharmonic",
            Verdict::ProperBiharmonic => "proper-biharmonic",
            Verdict::NotBiharmonic => "not-biharmonic",
            Verdict::Error => "error",
        }
    }
}

/// One criterion evaluated at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub grid_index: Vec<usize>,
    pub point: Vec<f64>,
    pub criterion: Criterion,
    pub components: Vec<f64>,
    /// `NaN` when evaluation failed.
    pub norm: f64,
    pub error: Option<String>,
}

impl Record {
    pub fn new(
        grid_index: Vec<usize>,
        point: Vec<f64>,
        criterion: Criterion,
        r: Result<Residual, String>,
    ) -> Self {
        match r {
            Ok(r) => Self {
                grid_index,
                point,
                criterion,
                components: r.components,
                norm: r.norm,
                error: None,
            },
            Err(e) => Self {
                grid_index,
                point,
                criterion,
                components: Vec::new(),
                norm: f64::NAN,
                error: Some(e),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionSummary {
    pub criterion: Criterion,
    pub tolerance: f64,
    pub max_norm: f64,
    pub argmax: Option<Vec<f64>>,
    /// Grid spread `max − min` of the first integral (Einstein criterion).
    pub spread: Option<f64>,
    pub mean: Option<f64>,
    pub errors: usize,
    pub verdict: Verdict,
    pub passed: bool,
}

impl CriterionSummary {
    pub fn from_records(
        criterion: Criterion,
        records: &[Record],
        tolerance: f64,
        max_mu: f64,
        proper_required: bool,
        proper_tol: f64,
    ) -> Self {
        let mine: Vec<&Record> = records.iter().filter(|r| r.criterion == criterion).collect();
        let errors = mine.iter().filter(|r| r.error.is_some()).count();
        let mut max_norm = f64::NEG_INFINITY;
        let mut argmax = None;
        for r in mine.iter().filter(|r| r.error.is_none()) {
            if r.norm > max_norm {
                max_norm = r.norm;
                argmax = Some(r.point.clone());
            }
        }
        if argmax.is_none() {
            max_norm = f64::NAN;
        }
        let (spread, mean) = if criterion == Criterion::Einstein {
            let vals: Vec<f64> = mine
                .iter()
                .filter_map(|r| r.components.first().copied())
                .collect();
            if vals.is_empty() {
                (None, None)
            } else {
                let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
                let mean = vals.iter().sum::<f64>() / vals.len() as f64;
                (Some(hi - lo), Some(mean))
            }
        } else {
            (None, None)
        };
        let zero = match (spread, mean) {
            (Some(s), Some(m)) => s < tolerance * (1.0 + m.abs()),
            _ => max_norm < tolerance,
        };
        let verdict = if errors > 0 || mine.is_empty() {
            Verdict::Error
        } else if !zero {
            Verdict::NotBiharmonic
        } else if max_mu > proper_tol {
            Verdict::ProperBiharmonic
        } else {
            Verdict::Biharmonic
        };
        let passed = match verdict {
            Verdict::ProperBiharmonic => true,
            Verdict::Biharmonic => !proper_required,
            _ => false,
        };
        Self {
            criterion,
            tolerance,
            max_norm,
            argmax,
            spread,
            mean,
            errors,
            verdict,
            passed,
        }
    }

    fn to_json(&self) -> Value {
        let mut v = json!({
            "tolerance": self.tolerance,
            "max_norm": self.max_norm,
            "argmax": self.argmax,
            "errors": self.errors,
            "verdict": self.verdict.name(),
            "passed": self.passed,
        });
        if let Some(s) = self.spread {
            v["spread"] = json!(s);
            v["mean"] = json!(self.mean);
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub version: String,
    pub manifest: Value,
    pub vars: Vec<String>,
    pub axes: Vec<String>,
    /// Grid order, then manifest criterion order.
    pub records: Vec<Record>,
    pub summary: BTreeMap<Criterion, CriterionSummary>,
    pub max_mean_curvature: f64,
    pub mean_curvature_errors: usize,
    pub proper_required: bool,
}

/// The report header; the only line that differs between identical runs.
pub fn header_line(unix_seconds: u64) -> String {
    format!("# generated_unix={unix_seconds}")
}

impl ResidualReport {
    pub fn exit_code(&self) -> i32 {
        if self.summary.values().any(|s| s.verdict == Verdict::Error) {
            EXIT_NUMERICAL
        } else if self.summary.values().all(|s| s.passed) {
            EXIT_OK
        } else {
            EXIT_VERDICT
        }
    }

    pub fn passed(&self) -> bool {
        self.exit_code() == EXIT_OK
    }

    pub fn to_json(&self) -> Value {
        let records: Vec<Value> = self
            .records
            .iter()
            .map(|r| {
                json!({
                    "grid_index": r.grid_index,
                    "coordinates": r.point,
                    "criterion": r.criterion.name(),
                    "components": r.components,
                    "norm": r.norm,
                    "error": r.error,
                })
            })
            .collect();
        let summary: serde_json::Map<String, Value> = self
            .summary
            .iter()
            .map(|(c, s)| (c.name().to_string(), s.to_json()))
            .collect();
        json!({
            "tool": {"name": "biharm", "version": self.version},
            "manifest": self.manifest,
            "chart_vars": self.vars,
            "grid_axes": self.axes,
            "records": records,
            "summary": summary,
            "max_mean_curvature": self.max_mean_curvature,
            "mean_curvature_errors": self.mean_curvature_errors,
            "proper_required": self.proper_required,
            "exit_code": self.exit_code(),
        })
    }

    pub fn json_body(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report is serializable");
        s.push('\n');
        s
    }

    pub fn csv_body(&self) -> Result<String, CliError> {
        let width = self.records.iter().map(|r| r.components.len()).max().unwrap_or(0);
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = self.axes.iter().map(|a| format!("i_{a}")).collect();
        header.extend(self.vars.iter().cloned());
        header.extend(["criterion", "norm", "error"].map(String::from));
        header.extend((0..width).map(|k| format!("c{k}")));
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&header).map_err(io)?;
        for r in &self.records {
            let mut row: Vec<String> = r.grid_index.iter().map(|i| i.to_string()).collect();
            row.extend(r.point.iter().map(|x| x.to_string()));
            row.push(r.criterion.name().to_string());
            row.push(if r.norm.is_nan() { String::new() } else { r.norm.to_string() });
            row.push(r.error.clone().unwrap_or_default());
            row.extend((0..width).map(|k| r.components.get(k).map(|c| c.to_string()).unwrap_or_default()));
            w.write_record(&row).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn body(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => Ok(self.json_body()),
            Format::Csv => self.csv_body(),
        }
    }

    /// Header line followed by the body.
    pub fn render(&self, format: Format, unix_seconds: u64) -> Result<String, CliError> {
        Ok(format!("{}\n{}", header_line(unix_seconds), self.body(format)?))
    }
}
