use crate::autodiff::Jet3;
use crate::error::{Error, Result};
use crate::geometry::{FieldJet, LocalGeometry};

use super::model::{BaseRicci, SubmersionModel};

/// Largest allowed deviation of the frame Gram matrix from the identity.
pub const ORTHONORMAL_TOL: f64 = 1e-8;

/// Integrability data `κ_i`, `P^k_ij`, `σ_ij` of a one-dimensional-fiber
/// model as jets at a point.
#[derive(Debug, Clone)]
pub struct FrameData {
    pub n: usize,
    pub kappa: Vec<Jet3>,
    /// `P^k_ij` at `[k*n*n + i*n + j]`.
    pub p: Vec<Jet3>,
    pub sigma: Vec<Vec<Jet3>>,
    /// `f^k_ij` at `[k*n*n + i*n + j]`.
    pub f: Vec<Jet3>,
}

impl FrameData {
    pub fn p(&self, k: usize, i: usize, j: usize) -> Jet3 {
        self.p[k * self.n * self.n + i * self.n + j]
    }

    pub fn f(&self, k: usize, i: usize, j: usize) -> Jet3 {
        self.f[k * self.n * self.n + i * self.n + j]
    }

    /// Builds `P^k_ij = ½(−f^j_ik − f^i_jk + f^k_ij)` from `f`.
    fn with_f(n: usize, kappa: Vec<Jet3>, f: Vec<Jet3>, sigma: Vec<Vec<Jet3>>) -> Self {
        let at = |k: usize, i: usize, j: usize| f[k * n * n + i * n + j];
        let mut p = vec![Jet3::constant(0.0); n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    p[k * n * n + i * n + j] = (at(k, i, j) - at(j, i, k) - at(i, j, k)).scale(0.5);
                }
            }
        }
        Self {
            n,
            kappa,
            p,
            sigma,
            f,
        }
    }
}

/// A submersion model around one point of the total space: the total
/// geometry and the adapted orthonormal frame as jets.
#[derive(Debug, Clone)]
pub struct LocalSubmersion<'a> {
    model: &'a SubmersionModel,
    geom: LocalGeometry,
    frame: Vec<FieldJet>,
    n: usize,
}

impl<'a> LocalSubmersion<'a> {
    pub fn at(model: &'a SubmersionModel, p: &[f64]) -> Result<Self> {
        let metric = model.total_metric()?;
        let geom = LocalGeometry::at(&metric, p)?;
        let n = model.base_dim();
        let frame = match model.frame_expressions() {
            Some(exprs) => exprs
                .iter()
                .map(|v| v.iter().map(|c| geom.eval(c)).collect::<Result<FieldJet>>())
                .collect::<Result<Vec<_>>>()?,
            None => Self::orthonormalized_frame(model, &geom)?,
        };
        let local = Self {
            model,
            geom,
            frame,
            n,
        };
        let dev = local.orthonormality_deviation();
        if !(dev <= ORTHONORMAL_TOL) {
            return Err(Error::FrameNotOrthonormal {
                point: p.to_vec(),
                deviation: dev,
            });
        }
        Ok(local)
    }

    /// Gram–Schmidt on base coordinate fields, then `e^{−λ}∂_z` on fibers.
    fn orthonormalized_frame(model: &SubmersionModel, geom: &LocalGeometry) -> Result<Vec<FieldJet>> {
        let SubmersionModel::WarpedProduct {
            base, fiber_dim, lambda,
        } = model
        else {
            return Err(Error::Unsupported(format!(
                "no adapted frame for a {} model",
                model.kind()
            )));
        };
        let b = base.dim();
        let m = b + fiber_dim;
        let mut frame: Vec<FieldJet> = Vec::with_capacity(m);
        for i in 0..b {
            let mut v: FieldJet = (0..m)
                .map(|c| Jet3::constant(if c == i { 1.0 } else { 0.0 }))
                .collect();
            for u in &frame {
                let c = geom.inner(&v, u);
                for (vc, uc) in v.iter_mut().zip(u) {
                    *vc -= c * *uc;
                }
            }
            let norm = geom.inner(&v, &v).sqrt();
            frame.push(v.iter().map(|&x| x / norm).collect());
        }
        let scale = (-geom.eval(lambda)?).exp();
        for s in 0..*fiber_dim {
            let mut v = vec![Jet3::constant(0.0); m];
            v[b + s] = scale;
            frame.push(v);
        }
        Ok(frame)
    }

    pub fn model(&self) -> &SubmersionModel {
        self.model
    }

    pub fn geometry(&self) -> &LocalGeometry {
        &self.geom
    }

    pub fn frame(&self) -> &[FieldJet] {
        &self.frame
    }

    /// Base dimension `n`.
    pub fn base_dim(&self) -> usize {
        self.n
    }

    /// Fiber dimension `m − n`.
    pub fn fiber_dim(&self) -> usize {
        self.frame.len() - self.n
    }

    pub fn orthonormality_deviation(&self) -> f64 {
        let m = self.frame.len();
        let mut dev: f64 = 0.0;
        for a in 0..m {
            for b in a..m {
                let target = if a == b { 1.0 } else { 0.0 };
                let gab = self.geom.inner(&self.frame[a], &self.frame[b]).value();
                dev = dev.max((gab - target).abs());
            }
        }
        dev
    }

    /// `g(X, e_a)` for the horizontal frame.
    pub fn horizontal_components(&self, x: &[Jet3]) -> Vec<Jet3> {
        (0..self.n).map(|a| self.geom.inner(x, &self.frame[a])).collect()
    }

    pub fn horizontal(&self, x: &[Jet3]) -> FieldJet {
        self.combine(&self.horizontal_components(x), 0)
    }

    pub fn vertical(&self, x: &[Jet3]) -> FieldJet {
        let h = self.horizontal(x);
        x.iter().zip(&h).map(|(a, b)| *a - *b).collect()
    }

    /// `Σ_a c_a e_{offset+a}`.
    fn combine(&self, coeffs: &[Jet3], offset: usize) -> FieldJet {
        let m = self.frame.len();
        (0..m)
            .map(|c| {
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(a, w)| *w * self.frame[offset + a][c])
                    .sum()
            })
            .collect()
    }

    /// `μ = (1/(m−n)) Σ_s (∇_{e_s} e_s)^H`.
    pub fn mean_curvature(&self) -> FieldJet {
        let m = self.frame.len();
        let k = self.fiber_dim() as f64;
        let mut acc = vec![Jet3::constant(0.0); m];
        for s in self.n..m {
            let es = &self.frame[s];
            let nab = self.geom.covariant(es, es);
            for (a, v) in acc.iter_mut().zip(self.horizontal(&nab)) {
                *a += v;
            }
        }
        acc.into_iter().map(|x| x.scale(1.0 / k)).collect()
    }

    /// Integrability data read off the Lie brackets of the frame:
    /// `[e_i, e_{n+1}] = κ_i e_{n+1}`, `[e_i, e_j] = f^k_ij e_k − 2σ_ij e_{n+1}`.
    pub fn bracket_data(&self) -> Result<FrameData> {
        self.require_line_fibers()?;
        let n = self.n;
        let v = &self.frame[n];
        let kappa = (0..n)
            .map(|i| self.geom.inner(&self.geom.bracket(&self.frame[i], v), v))
            .collect();
        let mut f = vec![Jet3::constant(0.0); n * n * n];
        let mut sigma = vec![vec![Jet3::constant(0.0); n]; n];
        for i in 0..n {
            for j in 0..n {
                let br = self.geom.bracket(&self.frame[i], &self.frame[j]);
                for k in 0..n {
                    f[k * n * n + i * n + j] = self.geom.inner(&br, &self.frame[k]);
                }
                sigma[i][j] = self.geom.inner(&br, v).scale(-0.5);
            }
        }
        Ok(FrameData::with_f(n, kappa, f, sigma))
    }

    /// Integrability data as declared by the model, or in closed form for
    /// twisted products. Other models fall back to [`Self::bracket_data`].
    pub fn declared_data(&self) -> Result<FrameData> {
        self.require_line_fibers()?;
        let n = self.n;
        match self.model {
            SubmersionModel::TwistedProduct { lambda, .. } => {
                let lam = self.geom.eval(lambda)?;
                let kappa = (0..n).map(|i| -lam.partial(i)).collect();
                let zero = Jet3::constant(0.0);
                Ok(FrameData::with_f(
                    n,
                    kappa,
                    vec![zero; n * n * n],
                    vec![vec![zero; n]; n],
                ))
            }
            SubmersionModel::IntegrabilityData(d) => {
                let kappa = d
                    .kappa()
                    .iter()
                    .map(|e| self.geom.eval(e))
                    .collect::<Result<Vec<_>>>()?;
                let mut f = vec![Jet3::constant(0.0); n * n * n];
                let mut sigma = vec![vec![Jet3::constant(0.0); n]; n];
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            f[k * n * n + i * n + j] = self.geom.eval(&d.f(i, j, k))?;
                        }
                        sigma[i][j] = self.geom.eval(&d.sigma(i, j))?;
                    }
                }
                Ok(FrameData::with_f(n, kappa, f, sigma))
            }
            _ => self.bracket_data(),
        }
    }

    fn require_line_fibers(&self) -> Result<()> {
        if self.fiber_dim() != 1 {
            return Err(Error::Unsupported(format!(
                "integrability data needs one-dimensional fibers, model has {}",
                self.fiber_dim()
            )));
        }
        Ok(())
    }

    /// `Ric^N(dφ(e_a), dφ(e_b))` for the horizontal frame, as values.
    pub fn base_ricci_frame(&self) -> Result<Vec<Vec<f64>>> {
        let n = self.n;
        if let SubmersionModel::IntegrabilityData(d) = self.model {
            return Ok(match d.base_ricci() {
                BaseRicci::Flat => vec![vec![0.0; n]; n],
                BaseRicci::Gauss(k) => {
                    let kv = self.geom.eval(k)?.value();
                    (0..n)
                        .map(|a| (0..n).map(|b| if a == b { kv } else { 0.0 }).collect())
                        .collect()
                }
                BaseRicci::Matrix(rows) => rows
                    .iter()
                    .map(|r| r.iter().map(|e| Ok(self.geom.eval(e)?.value())).collect())
                    .collect::<Result<Vec<Vec<f64>>>>()?,
            });
        }
        let base = self
            .model
            .base_metric()
            .ok_or_else(|| Error::Unsupported("model has no base chart".into()))?;
        let idx = self.model.base_indices().expect("coordinate projection");
        let q: Vec<f64> = idx.iter().map(|&i| self.geom.point()[i]).collect();
        let bg = LocalGeometry::at(&base, &q)?;
        let ric = bg.ricci();
        let push: Vec<Vec<f64>> = (0..n)
            .map(|a| idx.iter().map(|&i| self.frame[a][i].value()).collect())
            .collect();
        Ok((0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let mut s = 0.0;
                        for (u, ru) in ric.iter().enumerate() {
                            for (v, r) in ru.iter().enumerate() {
                                s += r.value() * push[a][u] * push[b][v];
                            }
                        }
                        s
                    })
                    .collect()
            })
            .collect())
    }

    /// `dφ(X)` in base coordinates from horizontal frame components, or
    /// the components themselves when the base has no chart.
    pub fn push_forward(&self, frame_components: &[f64]) -> Vec<f64> {
        match self.model.base_indices() {
            Some(idx) => idx
                .iter()
                .map(|&i| {
                    frame_components
                        .iter()
                        .enumerate()
                        .map(|(a, c)| c * self.frame[a][i].value())
                        .sum()
                })
                .collect(),
            None => frame_components.to_vec(),
        }
    }
}
