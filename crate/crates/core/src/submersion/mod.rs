//! Riemannian submersion models with adapted orthonormal frames, mean
//! curvature of the fibers and tension fields.

mod local;
mod model;

pub use local::{FrameData, LocalSubmersion, ORTHONORMAL_TOL};
pub use model::{BaseRicci, IntegrabilityModel, SubmersionModel, CYLINDRICAL_EPS};

use crate::error::{Error, Result};
use crate::geometry::{values, MetricField, TangentVector};

/// Default number of fiber samples in basicness checks.
pub const FIBER_SAMPLES: usize = 5;
/// Largest fiber variation of `dφ(μ)` still counted as basic.
pub const BASIC_TOL: f64 = 1e-9;

pub fn total_metric(model: &SubmersionModel) -> Result<MetricField> {
    model.total_metric()
}

/// Mean curvature vector of the fibers at `p`, by total-space components.
pub fn mean_curvature(model: &SubmersionModel, p: &[f64]) -> Result<TangentVector> {
    let s = LocalSubmersion::at(model, p)?;
    TangentVector::new(p.to_vec(), values(&s.mean_curvature()))
}

/// `τ(φ) = −(m−n) dφ(μ)`, in base coordinates at `φ(p)`. Models without a
/// base chart report components in the frame `dφ(e_1), …, dφ(e_n)`.
pub fn tension_field(model: &SubmersionModel, p: &[f64]) -> Result<TangentVector> {
    let s = LocalSubmersion::at(model, p)?;
    let k = s.fiber_dim() as f64;
    let mu = values(&s.horizontal_components(&s.mean_curvature()));
    let tau: Vec<f64> = s.push_forward(&mu).iter().map(|c| -k * c).collect();
    let q = model.project(p).unwrap_or_else(|| p.to_vec());
    Ok(TangentVector {
        base_point: q,
        components: tau,
    })
}

/// Outcome of a basicness test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasicCheck {
    pub basic: bool,
    pub max_variation: f64,
}

/// Tests whether `μ` is basic near `p`.
///
/// Coordinate projections sweep the fiber coordinates over
/// `fiber_samples` evenly spaced values and compare `dφ(μ)`. Models
/// without a base chart use the pointwise criterion that `[μ, V]` is
/// vertical for every vertical `V`, evaluated at each sample point given.
pub fn is_basic_mean_curvature(
    model: &SubmersionModel,
    p: &[f64],
    fiber_samples: usize,
) -> Result<BasicCheck> {
    if fiber_samples < 2 {
        return Err(Error::InvalidModel("need at least two fiber samples".into()));
    }
    let variation = match model.project(p) {
        Some(base) => {
            let reference = values(&LocalSubmersion::at(model, p)?.mean_curvature());
            let idx = model.base_indices().expect("coordinate projection");
            let ranges = model.fiber_sample_range();
            let mut worst: f64 = 0.0;
            for step in 0..fiber_samples {
                let t = step as f64 / (fiber_samples - 1) as f64;
                let fiber: Vec<f64> = ranges.iter().map(|(lo, hi)| lo + t * (hi - lo)).collect();
                let q = model.total_point(&base, &fiber)?;
                let mu = values(&LocalSubmersion::at(model, &q)?.mean_curvature());
                for &i in &idx {
                    worst = worst.max((mu[i] - reference[i]).abs());
                }
            }
            worst
        }
        None => {
            let s = LocalSubmersion::at(model, p)?;
            let g = s.geometry();
            let mu = s.mean_curvature();
            let mut worst: f64 = 0.0;
            for v in &s.frame()[s.base_dim()..] {
                let br = g.bracket(&mu, v);
                for c in s.horizontal_components(&br) {
                    worst = worst.max(c.value().abs());
                }
            }
            worst
        }
    };
    Ok(BasicCheck {
        basic: variation < BASIC_TOL,
        max_variation: variation,
    })
}

/// `P^k_ij`, `σ_ij` and `κ_i` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameConnection {
    n: usize,
    p: Vec<f64>,
    pub sigma: Vec<Vec<f64>>,
    pub kappa: Vec<f64>,
}

impl FrameConnection {
    /// `P^k_ij`, zero-based.
    pub fn p(&self, k: usize, i: usize, j: usize) -> f64 {
        self.p[k * self.n * self.n + i * self.n + j]
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

impl From<&FrameData> for FrameConnection {
    fn from(d: &FrameData) -> Self {
        Self {
            n: d.n,
            p: values(&d.p),
            sigma: d.sigma.iter().map(|r| values(r)).collect(),
            kappa: values(&d.kappa),
        }
    }
}

/// Connection data of a model with one-dimensional fibers, in the form
/// `∇_{e_i} e_j = P^k_ij e_k − σ_ij e_{n+1}`, `∇_{e_{n+1}} e_{n+1} = Σ κ_i e_i`.
pub fn frame_connection(model: &SubmersionModel, p: &[f64]) -> Result<FrameConnection> {
    let s = LocalSubmersion::at(model, p)?;
    Ok(FrameConnection::from(&s.declared_data()?))
}

/// Largest disagreement between the declared integrability data and the
/// Lie brackets of the frame.
pub fn bracket_deviation(model: &SubmersionModel, p: &[f64]) -> Result<f64> {
    let s = LocalSubmersion::at(model, p)?;
    let declared = s.declared_data()?;
    let computed = s.bracket_data()?;
    let n = s.base_dim();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        dev = dev.max((declared.kappa[i].value() - computed.kappa[i].value()).abs());
        for j in 0..n {
            dev = dev.max((declared.sigma[i][j].value() - computed.sigma[i][j].value()).abs());
            for k in 0..n {
                dev = dev.max((declared.f(k, i, j).value() - computed.f(k, i, j).value()).abs());
            }
        }
    }
    Ok(dev)
}

pub fn orthonormality_deviation(model: &SubmersionModel, p: &[f64]) -> Result<f64> {
    let metric = model.total_metric()?;
    let geom = crate::geometry::LocalGeometry::at(&metric, p)?;
    let frame = model
        .frame_expressions()
        .ok_or_else(|| Error::Unsupported("model frame is built pointwise".into()))?;
    let jets = frame
        .iter()
        .map(|v| v.iter().map(|c| geom.eval(c)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let mut dev: f64 = 0.0;
    for a in 0..jets.len() {
        for b in a..jets.len() {
            let target = if a == b { 1.0 } else { 0.0 };
            dev = dev.max((geom.inner(&jets[a], &jets[b]).value() - target).abs());
        }
    }
    Ok(dev)
}
