use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::biharmonic::Criterion;
use crate::expr::{parse, Expression};
use crate::geometry::MetricField;
use crate::submersion::{BaseRicci, IntegrabilityModel, SubmersionModel};

use super::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub model: ModelSpec,
    pub criteria: Vec<String>,
    /// Entries of the form `var=min:max:count`.
    #[serde(default)]
    pub grid: Vec<String>,
    /// Values for chart variables that are not swept.
    #[serde(default)]
    pub fixed: BTreeMap<String, Number>,
    /// Per-criterion zero thresholds.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    /// `biharmonic` (default) or `proper-biharmonic`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<String>,
    /// Einstein constant `a` of the base, `Ric = a·g`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub einstein_constant: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// A number given either literally or as an expression such as `pi/3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Literal(f64),
    Expr(String),
}

impl Number {
    pub fn value(&self) -> Result<f64, CliError> {
        match self {
            Number::Literal(v) => Ok(*v),
            Number::Expr(s) => constant(s),
        }
    }
}

fn constant(s: &str) -> Result<f64, CliError> {
    let e = parse(s).map_err(|e| CliError::Manifest(format!("`{s}`: {e}")))?;
    let v: f64 = e
        .eval(&BTreeMap::<String, f64>::new())
        .map_err(|e| CliError::Manifest(format!("`{s}` is not a constant: {e}")))?;
    if !v.is_finite() {
        return Err(CliError::Manifest(format!("`{s}` is not finite")));
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    WarpedProduct(WarpedSpec),
    TwistedProduct(TwistedSpec),
    Cylindrical(CylindricalSpec),
    IntegrabilityData(IntegrabilitySpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WarpedSpec {
    pub base: BaseSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_vars: Option<Vec<String>>,
    pub fiber_dim: usize,
    pub lambda: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistedSpec {
    pub base_dim: usize,
    pub lambda: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CylindricalSpec {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrabilitySpec {
    pub vars: Vec<String>,
    pub frame: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<String>>>,
    /// `"i,j,k"` (one-based) maps to `f^k_ij`.
    #[serde(default)]
    pub f: BTreeMap<String, String>,
    pub kappa: Vec<String>,
    /// `"i,j"` (one-based) maps to `σ_ij`.
    #[serde(default)]
    pub sigma: BTreeMap<String, String>,
    #[serde(default = "flat")]
    pub base_ricci: RicciSpec,
}

fn flat() -> RicciSpec {
    RicciSpec::Named("flat".into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BaseSpec {
    /// `euclidean(n)`, `sphere2` or `hyperbolic2`.
    Builtin(String),
    Explicit {
        vars: Vec<String>,
        entries: Vec<Vec<String>>,
        #[serde(default)]
        validity: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RicciSpec {
    /// Only `flat`.
    Named(String),
    Gauss { gauss: String },
    Matrix { matrix: Vec<Vec<String>> },
}

fn expr(s: &str) -> Result<Expression, CliError> {
    parse(s).map_err(|e| CliError::Manifest(format!("`{s}`: {e}")))
}

fn exprs(rows: &[Vec<String>]) -> Result<Vec<Vec<Expression>>, CliError> {
    rows.iter()
        .map(|r| r.iter().map(|s| expr(s)).collect())
        .collect()
}

fn indices<const N: usize>(key: &str) -> Result<[usize; N], CliError> {
    let parts: Vec<&str> = key.split(',').map(str::trim).collect();
    let bad = || CliError::Manifest(format!("index key `{key}` must be {N} comma-separated positive integers"));
    if parts.len() != N {
        return Err(bad());
    }
    let mut out = [0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        let v: usize = p.parse().map_err(|_| bad())?;
        if v == 0 {
            return Err(bad());
        }
        *o = v - 1;
    }
    Ok(out)
}

impl ModelSpec {
    pub fn build(&self) -> Result<SubmersionModel, CliError> {
        let invalid = |e: crate::Error| CliError::Manifest(e.to_string());
        match self {
            ModelSpec::WarpedProduct(WarpedSpec {
                base,
                base_vars,
                fiber_dim,
                lambda,
            }) => {
                let mut metric = match base {
                    BaseSpec::Builtin(name) => MetricField::builtin(name).map_err(invalid)?,
                    BaseSpec::Explicit {
                        vars,
                        entries,
                        validity,
                    } => {
                        let validity = validity.iter().map(|s| expr(s)).collect::<Result<_, _>>()?;
                        MetricField::new(vars.clone(), exprs(entries)?)
                            .and_then(|m| m.with_validity(validity))
                            .map_err(invalid)?
                    }
                };
                if let Some(vars) = base_vars {
                    metric = metric.with_vars(vars.clone()).map_err(invalid)?;
                }
                SubmersionModel::warped(metric, *fiber_dim, expr(lambda)?).map_err(invalid)
            }
            ModelSpec::TwistedProduct(TwistedSpec { base_dim, lambda }) => {
                SubmersionModel::twisted(*base_dim, expr(lambda)?).map_err(invalid)
            }
            ModelSpec::Cylindrical(_) => Ok(SubmersionModel::Cylindrical),
            ModelSpec::IntegrabilityData(IntegrabilitySpec {
                vars,
                frame,
                metric,
                f,
                kappa,
                sigma,
                base_ricci,
            }) => {
                let metric = match metric {
                    Some(rows) => Some(MetricField::new(vars.clone(), exprs(rows)?).map_err(invalid)?),
                    None => None,
                };
                let mut fs = BTreeMap::new();
                for (k, v) in f {
                    let [i, j, k] = indices::<3>(k)?;
                    fs.insert((i, j, k), expr(v)?);
                }
                let mut ss = BTreeMap::new();
                for (k, v) in sigma {
                    let [i, j] = indices::<2>(k)?;
                    ss.insert((i, j), expr(v)?);
                }
                let ricci = match base_ricci {
                    RicciSpec::Named(n) if n == "flat" => BaseRicci::Flat,
                    RicciSpec::Named(n) => {
                        return Err(CliError::Manifest(format!(
                            "unknown base_ricci `{n}`; use \"flat\", {{\"gauss\": …}} or {{\"matrix\": …}}"
                        )))
                    }
                    RicciSpec::Gauss { gauss } => BaseRicci::Gauss(expr(gauss)?),
                    RicciSpec::Matrix { matrix } => BaseRicci::Matrix(exprs(matrix)?),
                };
                let kappa = kappa.iter().map(|s| expr(s)).collect::<Result<_, _>>()?;
                let model = IntegrabilityModel::new(
                    vars.clone(),
                    exprs(frame)?,
                    metric,
                    fs,
                    kappa,
                    ss,
                    ricci,
                )
                .map_err(invalid)?;
                Ok(SubmersionModel::IntegrabilityData(model))
            }
        }
    }
}

/// One swept variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub var: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let bad = |why: &str| CliError::Manifest(format!("grid `{spec}`: {why}; expected var=min:max:count"));
        let (var, range) = spec.split_once('=').ok_or_else(|| bad("missing `=`"))?;
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("need three `:`-separated fields"));
        }
        let min = constant(parts[0].trim())?;
        let max = constant(parts[1].trim())?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| bad("count must be a positive integer"))?;
        if count < 2 {
            return Err(bad("count must be at least 2"));
        }
        if !(min <= max) {
            return Err(bad("min exceeds max"));
        }
        Ok(Self {
            var: var.trim().to_string(),
            min,
            max,
            count,
        })
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.max
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64
        }
    }
}

fn pointer(prefix: &str, path: &serde_path_to_error::Path) -> String {
    let path = path.to_string();
    if path == "." {
        prefix.to_string()
    } else {
        format!("{prefix}/{}", path.replace(['.', '['], "/").replace(']', ""))
    }
}

fn deserialize_at<T: serde::de::DeserializeOwned>(value: &serde_json::Value, prefix: &str) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        CliError::Manifest(format!("at `{}`: {}", pointer(prefix, e.path()), e.inner()))
    })
}

fn model_error(value: &serde_json::Value) -> Option<CliError> {
    let mut model = value.get("model")?.as_object()?.clone();
    let kind = model.remove("kind")?;
    let rest = serde_json::Value::Object(model);
    match kind.as_str()? {
        "warped_product" => deserialize_at::<WarpedSpec>(&rest, "/model").err(),
        "twisted_product" => deserialize_at::<TwistedSpec>(&rest, "/model").err(),
        "cylindrical" => deserialize_at::<CylindricalSpec>(&rest, "/model").err(),
        "integrability_data" => deserialize_at::<IntegrabilitySpec>(&rest, "/model").err(),
        _ => None,
    }
}

impl Manifest {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| CliError::Manifest(format!("at ``: {e}")))?;
        deserialize_at::<Manifest>(&value, "").map_err(|err| {
            // the tagged model block hides the failing field; locate it directly
            model_error(&value).unwrap_or(err)
        })
    }

    pub fn criteria(&self) -> Result<Vec<Criterion>, CliError> {
        if self.criteria.is_empty() {
            return Err(CliError::Manifest("at `/criteria`: no criteria requested".into()));
        }
        self.criteria
            .iter()
            .enumerate()
            .map(|(i, c)| {
                c.parse::<Criterion>()
                    .map_err(|e| CliError::Manifest(format!("at `/criteria/{i}`: {e}")))
            })
            .collect()
    }

    pub fn axes(&self) -> Result<Vec<Axis>, CliError> {
        let axes = self.grid.iter().map(|g| Axis::parse(g)).collect::<Result<Vec<_>, _>>()?;
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].iter().any(|b| b.var == a.var) {
                return Err(CliError::Manifest(format!("grid sweeps `{}` twice", a.var)));
            }
        }
        Ok(axes)
    }

    pub fn proper_required(&self) -> Result<bool, CliError> {
        match self.expect.as_deref() {
            None | Some("biharmonic") => Ok(false),
            Some("proper-biharmonic") => Ok(true),
            Some(other) => Err(CliError::Manifest(format!(
                "at `/expect`: `{other}` is neither biharmonic nor proper-biharmonic"
            ))),
        }
    }
}
