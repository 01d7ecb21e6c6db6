//! Geometry of a metric in a neighbourhood of one point, with every
//! quantity carried as a jet in the chart coordinates.

use crate::autodiff::Jet3;
use crate::error::{Error, Result};
use crate::expr::{Chart, Expression};

use super::{linalg, MetricField};

/// Jet-valued vector field components in chart coordinates.
pub type FieldJet = Vec<Jet3>;

/// Metric, inverse metric and Christoffel symbols at a point, as jets.
///
/// Metric entries are exact to order 3, so Christoffel symbols are exact
/// to order 2 and curvature to order 1.
#[derive(Debug, Clone)]
pub struct LocalGeometry {
    point: Vec<f64>,
    vars: Vec<String>,
    coords: Vec<Jet3>,
    metric: Vec<Vec<Jet3>>,
    inverse: Vec<Vec<Jet3>>,
    /// `Γ^k_ij` stored at `k*n*n + i*n + j`.
    christoffel: Vec<Jet3>,
}

impl LocalGeometry {
    pub fn at(metric: &MetricField, p: &[f64]) -> Result<Self> {
        metric.check_domain(p)?;
        let n = metric.dim();
        let coords = Jet3::seed(p)?;
        let g = metric.eval_jets(&coords, p)?;
        let ginv = linalg::spd_inverse(&g).ok_or_else(|| Error::SingularMetric(p.to_vec()))?;
        // dg[l][i][j] = ∂_l g_ij
        let dg: Vec<Vec<Vec<Jet3>>> = (0..n)
            .map(|l| {
                (0..n)
                    .map(|i| (0..n).map(|j| g[i][j].partial(l)).collect())
                    .collect()
            })
            .collect();
        let mut first_kind = vec![Jet3::constant(0.0); n * n * n];
        for l in 0..n {
            for i in 0..n {
                for j in i..n {
                    let v = (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]).scale(0.5);
                    first_kind[l * n * n + i * n + j] = v;
                    first_kind[l * n * n + j * n + i] = v;
                }
            }
        }
        let mut christoffel = vec![Jet3::constant(0.0); n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let v: Jet3 = (0..n)
                        .map(|l| ginv[k][l] * first_kind[l * n * n + i * n + j])
                        .sum();
                    christoffel[k * n * n + i * n + j] = v;
                    christoffel[k * n * n + j * n + i] = v;
                }
            }
        }
        Ok(Self {
            point: p.to_vec(),
            vars: metric.vars().to_vec(),
            coords,
            metric: g,
            inverse: ginv,
            christoffel,
        })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn coords(&self) -> &[Jet3] {
        &self.coords
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn metric(&self) -> &[Vec<Jet3>] {
        &self.metric
    }

    pub fn inverse_metric(&self) -> &[Vec<Jet3>] {
        &self.inverse
    }

    /// `Γ^k_ij`.
    pub fn gamma(&self, k: usize, i: usize, j: usize) -> &Jet3 {
        let n = self.dim();
        &self.christoffel[k * n * n + i * n + j]
    }

    /// Evaluates an expression in the chart variables as a jet.
    pub fn eval(&self, e: &Expression) -> Result<Jet3> {
        Ok(e.eval(&Chart {
            names: &self.vars,
            values: &self.coords,
        })?)
    }

    pub fn inner(&self, x: &[Jet3], y: &[Jet3]) -> Jet3 {
        let n = self.dim();
        let mut s = Jet3::constant(0.0);
        for i in 0..n {
            for j in 0..n {
                s += self.metric[i][j] * x[i] * y[j];
            }
        }
        s
    }

    /// `g^{ij} ω_j`.
    pub fn raise(&self, covector: &[Jet3]) -> FieldJet {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.inverse[i][j] * covector[j]).sum())
            .collect()
    }

    /// `X(f) = X^a ∂_a f`.
    pub fn directional(&self, x: &[Jet3], f: &Jet3) -> Jet3 {
        f.along(x)
    }

    /// `∇_X Y`.
    pub fn covariant(&self, x: &[Jet3], y: &[Jet3]) -> FieldJet {
        let n = self.dim();
        (0..n)
            .map(|c| {
                let mut s = y[c].along(x);
                for a in 0..n {
                    for b in 0..n {
                        s += *self.gamma(c, a, b) * x[a] * y[b];
                    }
                }
                s
            })
            .collect()
    }

    /// Lie bracket `[X, Y]`.
    pub fn bracket(&self, x: &[Jet3], y: &[Jet3]) -> FieldJet {
        (0..self.dim())
            .map(|c| y[c].along(x) - x[c].along(y))
            .collect()
    }

    pub fn gradient(&self, f: &Jet3) -> FieldJet {
        let df: Vec<Jet3> = (0..self.dim()).map(|j| f.partial(j)).collect();
        self.raise(&df)
    }

    /// Covariant Hessian `∂_i∂_j f − Γ^k_ij ∂_k f`.
    pub fn hessian(&self, f: &Jet3) -> Vec<Vec<Jet3>> {
        let n = self.dim();
        let df: Vec<Jet3> = (0..n).map(|k| f.partial(k)).collect();
        let mut h = vec![vec![Jet3::constant(0.0); n]; n];
        for i in 0..n {
            for j in i..n {
                let mut v = df[i].partial(j);
                for (k, dfk) in df.iter().enumerate() {
                    v -= *self.gamma(k, i, j) * *dfk;
                }
                h[i][j] = v;
                h[j][i] = v;
            }
        }
        h
    }

    /// Laplace–Beltrami operator `Tr_g Hess f` (nonnegative on `x²` in flat space).
    pub fn laplacian(&self, f: &Jet3) -> Jet3 {
        let h = self.hessian(f);
        self.trace(&h)
    }

    /// `g^{ij} B_ij`.
    pub fn trace(&self, b: &[Vec<Jet3>]) -> Jet3 {
        let n = self.dim();
        let mut s = Jet3::constant(0.0);
        for i in 0..n {
            for j in 0..n {
                s += self.inverse[i][j] * b[i][j];
            }
        }
        s
    }

    /// `(∇V)^c_b = ∂_b V^c + Γ^c_bd V^d`, indexed `[c][b]`.
    pub fn covariant_differential(&self, v: &[Jet3]) -> Vec<Vec<Jet3>> {
        let n = self.dim();
        (0..n)
            .map(|c| {
                (0..n)
                    .map(|b| {
                        let mut s = v[c].partial(b);
                        for (d, vd) in v.iter().enumerate() {
                            s += *self.gamma(c, b, d) * *vd;
                        }
                        s
                    })
                    .collect()
            })
            .collect()
    }

    /// Rough Laplacian `Tr_g ∇²V` of a vector field.
    pub fn rough_laplacian(&self, v: &[Jet3]) -> FieldJet {
        let n = self.dim();
        let dv = self.covariant_differential(v);
        (0..n)
            .map(|c| {
                let mut second = vec![vec![Jet3::constant(0.0); n]; n];
                for a in 0..n {
                    for b in 0..n {
                        let mut s = dv[c][b].partial(a);
                        for e in 0..n {
                            s += *self.gamma(c, a, e) * dv[e][b];
                            s -= *self.gamma(e, a, b) * dv[c][e];
                        }
                        second[a][b] = s;
                    }
                }
                self.trace(&second)
            })
            .collect()
    }

    /// `R^l_ijk = ∂_i Γ^l_jk − ∂_j Γ^l_ik + Γ^l_im Γ^m_jk − Γ^l_jm Γ^m_ik`,
    /// the components of `R(∂_i, ∂_j)∂_k = [∇_i, ∇_j]∂_k`.
    pub fn riemann_component(&self, l: usize, i: usize, j: usize, k: usize) -> Jet3 {
        let n = self.dim();
        let mut r = self.gamma(l, j, k).partial(i) - self.gamma(l, i, k).partial(j);
        for m in 0..n {
            r += *self.gamma(l, i, m) * *self.gamma(m, j, k);
            r -= *self.gamma(l, j, m) * *self.gamma(m, i, k);
        }
        r
    }

    /// `Ric_jk = R^i_ijk`; positive on round spheres.
    pub fn ricci(&self) -> Vec<Vec<Jet3>> {
        let n = self.dim();
        let mut ric = vec![vec![Jet3::constant(0.0); n]; n];
        for j in 0..n {
            for k in j..n {
                let v: Jet3 = (0..n).map(|i| self.riemann_component(i, i, j, k)).sum();
                ric[j][k] = v;
                ric[k][j] = v;
            }
        }
        ric
    }

    /// Ricci operator `Ric(X) = Σ R(X, e_a) e_a` applied to `x`.
    pub fn ricci_op(&self, ricci: &[Vec<Jet3>], x: &[Jet3]) -> FieldJet {
        let n = self.dim();
        let lowered: Vec<Jet3> = (0..n)
            .map(|j| (0..n).map(|k| ricci[j][k] * x[k]).sum())
            .collect();
        self.raise(&lowered)
    }
}

pub fn values(v: &[Jet3]) -> Vec<f64> {
    v.iter().map(Jet3::value).collect()
}
