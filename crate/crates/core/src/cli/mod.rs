//! Manifest-driven grid sweeps, residual reports and the example suite.

mod families;
mod manifest;
mod report;

use std::collections::BTreeMap;

use rayon::prelude::*;

pub use families::{parse_family_args, run_families, FamilySpec};
pub use manifest::{
    Axis, BaseSpec, CylindricalSpec, Format, IntegrabilitySpec, Manifest, ModelSpec, Number,
    OutputSpec, RicciSpec, TwistedSpec, WarpedSpec,
};
pub use report::{CriterionSummary, Record, ResidualReport, Verdict};

use crate::biharmonic::{self, Criterion, Residual, FD_TOL, PROPER_TOL};
use crate::geometry::values;
use crate::submersion::{LocalSubmersion, SubmersionModel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERDICT: i32 = 2;
pub const EXIT_MANIFEST: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("manifest error: {0}")]
    Manifest(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Manifest(_) | CliError::Io(_) => EXIT_MANIFEST,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

/// Zero threshold used when neither the manifest nor the command line
/// overrides it.
pub fn default_tolerance(c: Criterion) -> f64 {
    match c {
        Criterion::Bochner => FD_TOL,
        other => other.default_tol(),
    }
}

/// Options that do not come from the manifest.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CheckOptions {
    /// Overrides every tolerance.
    pub tol: Option<f64>,
    /// Worker count; `None` uses the global rayon pool.
    pub jobs: Option<usize>,
}

/// A fully resolved sweep: total-space points in grid order.
struct Plan {
    model: SubmersionModel,
    criteria: Vec<Criterion>,
    vars: Vec<String>,
    points: Vec<(Vec<usize>, Vec<f64>)>,
    axes: Vec<Axis>,
}

fn default_fixed(model: &SubmersionModel, var: &str) -> Option<f64> {
    match (model, var) {
        (SubmersionModel::Cylindrical, "theta") => Some(std::f64::consts::FRAC_PI_3),
        (SubmersionModel::Cylindrical, "phi") => Some(0.0),
        (SubmersionModel::IntegrabilityData(_), _) => None,
        _ => {
            let fiber = model.fiber_indices();
            let vars = model.vars();
            fiber.iter().any(|&i| vars[i] == var).then_some(0.0)
        }
    }
}

fn plan(manifest: &Manifest) -> Result<Plan, CliError> {
    let model = manifest.model.build()?;
    let criteria = manifest.criteria()?;
    let axes = manifest.axes()?;
    let vars = model.vars();
    for a in &axes {
        if !vars.contains(&a.var) {
            return Err(CliError::Manifest(format!(
                "grid variable `{}` is not a chart variable of the model {vars:?}",
                a.var
            )));
        }
    }
    for name in manifest.fixed.keys() {
        if !vars.contains(name) {
            return Err(CliError::Manifest(format!(
                "fixed variable `{name}` is not a chart variable of the model {vars:?}"
            )));
        }
        if axes.iter().any(|a| &a.var == name) {
            return Err(CliError::Manifest(format!("`{name}` is both swept and fixed")));
        }
    }
    let mut base = vec![0.0; vars.len()];
    let mut swept = vec![None; vars.len()];
    for (i, v) in vars.iter().enumerate() {
        if let Some(k) = axes.iter().position(|a| &a.var == v) {
            swept[i] = Some(k);
        } else if let Some(x) = manifest.fixed.get(v) {
            base[i] = x.value()?;
        } else if let Some(x) = default_fixed(&model, v) {
            base[i] = x;
        } else {
            return Err(CliError::Manifest(format!(
                "chart variable `{v}` is neither swept nor fixed"
            )));
        }
    }
    let total: usize = axes.iter().map(|a| a.count).product();
    let mut points = Vec::with_capacity(total);
    for flat in 0..total {
        let mut idx = vec![0; axes.len()];
        let mut rem = flat;
        for (k, a) in axes.iter().enumerate().rev() {
            idx[k] = rem % a.count;
            rem /= a.count;
        }
        let mut p = base.clone();
        for (i, s) in swept.iter().enumerate() {
            if let Some(k) = s {
                p[i] = axes[*k].value(idx[*k]);
            }
        }
        points.push((idx, p));
    }
    let metric = model.total_metric().map_err(|e| CliError::Manifest(e.to_string()))?;
    for (_, p) in &points {
        metric
            .check_domain(p)
            .map_err(|e| CliError::Manifest(format!("grid leaves the chart domain: {e}")))?;
    }
    Ok(Plan {
        model,
        criteria,
        vars,
        points,
        axes,
    })
}

fn warped_parts(model: &SubmersionModel) -> crate::Result<(&crate::geometry::MetricField, &crate::expr::Expression, usize)> {
    match model {
        SubmersionModel::WarpedProduct {
            base,
            fiber_dim,
            lambda,
        } => Ok((base, lambda, *fiber_dim)),
        other => Err(crate::Error::Unsupported(format!(
            "this criterion needs a warped product, not a {} model",
            other.kind()
        ))),
    }
}

/// Evaluates one criterion at one total-space point.
pub fn evaluate(
    model: &SubmersionModel,
    criterion: Criterion,
    p: &[f64],
    einstein_constant: f64,
) -> crate::Result<Residual> {
    let project = || model.project(p).expect("warped products project to coordinates");
    match criterion {
        Criterion::General => biharmonic::bitension_general(model, p),
        Criterion::Basic => biharmonic::bitension_basic(model, p),
        Criterion::Warped => {
            let (base, lambda, n) = warped_parts(model)?;
            let mut r = biharmonic::warped_residual(base, lambda, n, &project())?;
            r.point = p.to_vec();
            Ok(r)
        }
        Criterion::Einstein => {
            let (base, lambda, n) = warped_parts(model)?;
            let v = biharmonic::einstein_first_integral(lambda, einstein_constant, n, base, &project())?;
            Ok(Residual::new(p.to_vec(), vec![v], Criterion::Einstein))
        }
        Criterion::Integrability => biharmonic::integrability_residuals(model, p),
        Criterion::Twisted => match model {
            SubmersionModel::TwistedProduct { base_dim, lambda } => {
                let comps = (0..*base_dim)
                    .map(|i| biharmonic::twisted_residual(lambda, p, i))
                    .collect::<crate::Result<Vec<_>>>()?;
                Ok(Residual::new(p.to_vec(), comps, Criterion::Twisted))
            }
            other => Err(crate::Error::Unsupported(format!(
                "the twisted criterion needs a twisted product, not a {} model",
                other.kind()
            ))),
        },
        Criterion::Bochner => {
            let (base, lambda, _) = warped_parts(model)?;
            let v = biharmonic::bochner_residual(base, lambda, &project())?;
            Ok(Residual::new(p.to_vec(), vec![v], Criterion::Bochner))
        }
    }
}

/// `|μ|_g` at `p`.
fn mean_curvature_norm(model: &SubmersionModel, p: &[f64]) -> crate::Result<f64> {
    let s = LocalSubmersion::at(model, p)?;
    let mu = s.horizontal_components(&s.mean_curvature());
    Ok(values(&mu).iter().map(|c| c * c).sum::<f64>().sqrt())
}

struct PointResult {
    mu: Result<f64, String>,
    residuals: Vec<Result<Residual, String>>,
}

fn evaluate_point(plan: &Plan, p: &[f64], a: f64) -> PointResult {
    PointResult {
        mu: mean_curvature_norm(&plan.model, p).map_err(|e| e.to_string()),
        residuals: plan
            .criteria
            .iter()
            .map(|&c| evaluate(&plan.model, c, p, a).map_err(|e| e.to_string()))
            .collect(),
    }
}

/// Runs every criterion of the manifest over its grid.
pub fn run_check(manifest: &Manifest, opts: CheckOptions) -> Result<ResidualReport, CliError> {
    let plan = plan(manifest)?;
    let proper = manifest.proper_required()?;
    let a = manifest.einstein_constant.unwrap_or(0.0);
    let mut tolerances = BTreeMap::new();
    for c in &plan.criteria {
        let tol = match (opts.tol, manifest.tolerances.get(c.name())) {
            (Some(t), _) => t,
            (None, Some(t)) => *t,
            (None, None) => default_tolerance(*c),
        };
        if !(tol > 0.0) {
            return Err(CliError::Manifest(format!("tolerance for {c} must be positive")));
        }
        tolerances.insert(*c, tol);
    }
    for name in manifest.tolerances.keys() {
        if !plan.criteria.iter().any(|c| c.name() == name) {
            return Err(CliError::Manifest(format!(
                "at `/tolerances/{name}`: not a requested criterion"
            )));
        }
    }
    let work = || -> Vec<PointResult> {
        plan.points
            .par_iter()
            .map(|(_, p)| evaluate_point(&plan, p, a))
            .collect()
    };
    let results = match opts.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| CliError::Numerical(format!("cannot start workers: {e}")))?
            .install(work),
        None => work(),
    };
    let mut records = Vec::with_capacity(plan.points.len() * plan.criteria.len());
    let mut max_mu: f64 = 0.0;
    let mut mu_errors = 0;
    for ((idx, p), res) in plan.points.iter().zip(&results) {
        match &res.mu {
            Ok(m) => max_mu = max_mu.max(*m),
            Err(_) => mu_errors += 1,
        }
        for (c, r) in plan.criteria.iter().zip(&res.residuals) {
            records.push(Record::new(idx.clone(), p.clone(), *c, r.clone()));
        }
    }
    let summary = plan
        .criteria
        .iter()
        .map(|&c| {
            let tol = tolerances[&c];
            (
                c,
                CriterionSummary::from_records(c, &records, tol, max_mu, proper, PROPER_TOL),
            )
        })
        .collect();
    let echo = serde_json::to_value(manifest).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(ResidualReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        manifest: echo,
        vars: plan.vars.clone(),
        axes: plan.axes.iter().map(|a| a.var.clone()).collect(),
        records,
        summary,
        max_mean_curvature: max_mu,
        mean_curvature_errors: mu_errors,
        proper_required: proper,
    })
}
