//! Metric-level differential geometry on a single chart: Christoffel
//! symbols, curvature, gradient, Hessian, Laplace–Beltrami and the rough
//! Laplacian of vector fields.
//!
//! All metric derivatives come from jets of the entry expressions. Sign
//! conventions: `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]}Z`, Ricci is
//! positive on spheres, and `Δ = Tr_g Hess`.

pub mod linalg;
mod local;
mod metric;

pub use local::{values, FieldJet, LocalGeometry};
pub use metric::MetricField;

use crate::autodiff::Jet3;
use crate::error::{Error, Result};
use crate::expr::Expression;

/// A tangent vector at a point, in chart components.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub base_point: Vec<f64>,
    pub components: Vec<f64>,
}

impl TangentVector {
    pub fn new(base_point: Vec<f64>, components: Vec<f64>) -> Result<Self> {
        if base_point.len() != components.len() {
            return Err(Error::DimensionMismatch {
                expected: base_point.len(),
                found: components.len(),
            });
        }
        Ok(Self {
            base_point,
            components,
        })
    }
}

/// Riemann tensor `R^l_ijk` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Riemann {
    dim: usize,
    data: Vec<f64>,
}

impl Riemann {
    pub fn get(&self, l: usize, i: usize, j: usize, k: usize) -> f64 {
        let n = self.dim;
        self.data[((l * n + i) * n + j) * n + k]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Curvature quantities at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureSlice {
    pub point: Vec<f64>,
    pub riemann: Riemann,
    pub ricci: Vec<Vec<f64>>,
    /// `Ric^i_j`, the Ricci operator with the index raised.
    pub ricci_op: Vec<Vec<f64>>,
}

/// A vector field that can be evaluated as jets around a point.
pub trait VectorField {
    fn components(&self, geom: &LocalGeometry) -> Result<FieldJet>;
}

impl<F> VectorField for F
where
    F: Fn(&LocalGeometry) -> Result<FieldJet>,
{
    fn components(&self, geom: &LocalGeometry) -> Result<FieldJet> {
        self(geom)
    }
}

/// Field whose chart components are given as expressions.
#[derive(Debug, Clone)]
pub struct ExpressionField(pub Vec<Expression>);

impl VectorField for ExpressionField {
    fn components(&self, geom: &LocalGeometry) -> Result<FieldJet> {
        if self.0.len() != geom.dim() {
            return Err(Error::DimensionMismatch {
                expected: geom.dim(),
                found: self.0.len(),
            });
        }
        self.0.iter().map(|e| geom.eval(e)).collect()
    }
}

/// The gradient field of a function.
#[derive(Debug, Clone)]
pub struct GradientField(pub Expression);

impl VectorField for GradientField {
    fn components(&self, geom: &LocalGeometry) -> Result<FieldJet> {
        Ok(geom.gradient(&geom.eval(&self.0)?))
    }
}

fn check_vars(g: &MetricField, f: &Expression) -> Result<()> {
    match f.free_vars().into_iter().find(|v| !g.vars().contains(v)) {
        Some(v) => Err(Error::InvalidModel(format!(
            "`{v}` is not a chart variable of {}",
            g.label()
        ))),
        None => Ok(()),
    }
}

/// `Γ^k_ij`, indexed `[k][i][j]`.
pub fn christoffel(g: &MetricField, p: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
    let geom = LocalGeometry::at(g, p)?;
    let n = geom.dim();
    Ok((0..n)
        .map(|k| {
            (0..n)
                .map(|i| (0..n).map(|j| geom.gamma(k, i, j).value()).collect())
                .collect()
        })
        .collect())
}

pub fn riemann(g: &MetricField, p: &[f64]) -> Result<Riemann> {
    let geom = LocalGeometry::at(g, p)?;
    Ok(riemann_of(&geom))
}

fn riemann_of(geom: &LocalGeometry) -> Riemann {
    let n = geom.dim();
    let mut data = Vec::with_capacity(n * n * n * n);
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    data.push(geom.riemann_component(l, i, j, k).value());
                }
            }
        }
    }
    Riemann { dim: n, data }
}

pub fn curvature(g: &MetricField, p: &[f64]) -> Result<CurvatureSlice> {
    let geom = LocalGeometry::at(g, p)?;
    let riemann = riemann_of(&geom);
    let n = geom.dim();
    let ric = geom.ricci();
    let ricci: Vec<Vec<f64>> = ric.iter().map(|r| values(r)).collect();
    let ricci_op = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n)
                        .map(|k| geom.inverse_metric()[i][k].value() * ricci[k][j])
                        .sum()
                })
                .collect()
        })
        .collect();
    Ok(CurvatureSlice {
        point: p.to_vec(),
        riemann,
        ricci,
        ricci_op,
    })
}

pub fn ricci(g: &MetricField, p: &[f64]) -> Result<Vec<Vec<f64>>> {
    let geom = LocalGeometry::at(g, p)?;
    Ok(geom.ricci().iter().map(|r| values(r)).collect())
}

pub fn ricci_op(g: &MetricField, p: &[f64], x: &TangentVector) -> Result<TangentVector> {
    if x.components.len() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: x.components.len(),
        });
    }
    let geom = LocalGeometry::at(g, p)?;
    let xs: Vec<Jet3> = x.components.iter().map(|&c| Jet3::constant(c)).collect();
    let out = geom.ricci_op(&geom.ricci(), &xs);
    TangentVector::new(p.to_vec(), values(&out))
}

/// Sectional curvature of the coordinate plane spanned by `∂_i, ∂_j`.
pub fn sectional_curvature(g: &MetricField, p: &[f64], i: usize, j: usize) -> Result<f64> {
    let geom = LocalGeometry::at(g, p)?;
    let n = geom.dim();
    let gm = geom.metric();
    // g(R(∂_i, ∂_j)∂_j, ∂_i)
    let num: f64 = (0..n)
        .map(|l| gm[i][l].value() * geom.riemann_component(l, i, j, j).value())
        .sum();
    let area = gm[i][i].value() * gm[j][j].value() - gm[i][j].value().powi(2);
    Ok(num / area)
}

pub fn gradient(g: &MetricField, f: &Expression, p: &[f64]) -> Result<TangentVector> {
    check_vars(g, f)?;
    let geom = LocalGeometry::at(g, p)?;
    let grad = geom.gradient(&geom.eval(f)?);
    TangentVector::new(p.to_vec(), values(&grad))
}

pub fn hessian(g: &MetricField, f: &Expression, p: &[f64]) -> Result<Vec<Vec<f64>>> {
    check_vars(g, f)?;
    let geom = LocalGeometry::at(g, p)?;
    Ok(geom.hessian(&geom.eval(f)?).iter().map(|r| values(r)).collect())
}

pub fn laplacian(g: &MetricField, f: &Expression, p: &[f64]) -> Result<f64> {
    check_vars(g, f)?;
    let geom = LocalGeometry::at(g, p)?;
    Ok(geom.laplacian(&geom.eval(f)?).value())
}

/// `Tr_g ∇²V` for a field known to order 2 around `p`.
pub fn rough_laplacian_vec(
    g: &MetricField,
    field: &dyn VectorField,
    p: &[f64],
) -> Result<TangentVector> {
    let geom = LocalGeometry::at(g, p)?;
    let v = field.components(&geom)?;
    if v.len() != geom.dim() {
        return Err(Error::DimensionMismatch {
            expected: geom.dim(),
            found: v.len(),
        });
    }
    TangentVector::new(p.to_vec(), values(&geom.rough_laplacian(&v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::{fd_partial, FdScheme};
    use crate::expr::parse;

    fn e(s: &str) -> Expression {
        parse(s).unwrap()
    }

    fn metric(vars: &[&str], entries: &[&[&str]]) -> MetricField {
        MetricField::new(
            vars.iter().map(|s| s.to_string()).collect(),
            entries.iter().map(|r| r.iter().map(|s| e(s)).collect()).collect(),
        )
        .unwrap()
    }

    /// Christoffel symbols from finite differences of the metric entries.
    fn christoffel_fd(g: &MetricField, p: &[f64], h: f64) -> Vec<Vec<Vec<f64>>> {
        let n = g.dim();
        let s = FdScheme::fixed(h).unwrap();
        let dg = |l: usize, i: usize, j: usize| {
            fd_partial(|q| g.eval_values(q).map(|m| m[i][j]).unwrap_or(f64::NAN), p, &[l], &s)
                .unwrap()
        };
        let gv = g.eval_values(p).unwrap();
        let ginv = linalg::spd_inverse(&gv).unwrap();
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                (0..n)
                                    .map(|l| {
                                        0.5 * ginv[k][l] * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j))
                                    })
                                    .sum()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    /// Brute-force `R^l_ijk` with finite differences of FD Christoffels.
    fn riemann_fd(g: &MetricField, p: &[f64], l: usize, i: usize, j: usize, k: usize) -> f64 {
        let h = 1e-3;
        let gam = christoffel_fd(g, p, 1e-5);
        let d = |dir: usize, a: usize, b: usize, c: usize| {
            let mut q = p.to_vec();
            q[dir] += h;
            let plus = christoffel_fd(g, &q, 1e-5)[a][b][c];
            q[dir] -= 2.0 * h;
            let minus = christoffel_fd(g, &q, 1e-5)[a][b][c];
            (plus - minus) / (2.0 * h)
        };
        let n = g.dim();
        let mut r = d(i, l, j, k) - d(j, l, i, k);
        for m in 0..n {
            r += gam[l][i][m] * gam[m][j][k] - gam[l][j][m] * gam[m][i][k];
        }
        r
    }

    #[test]
    fn flat_christoffels_vanish() {
        let g = MetricField::euclidean(3);
        let c = christoffel(&g, &[0.1, 0.2, 0.3]).unwrap();
        assert!(c.iter().flatten().flatten().all(|&x| x == 0.0));
    }

    #[test]
    fn polar_christoffels() {
        let g = metric(&["r", "theta"], &[&["1", "0"], &["0", "r^2"]]);
        let p = [2.0, 0.4];
        let c = christoffel(&g, &p).unwrap();
        let oracle = christoffel_fd(&g, &p, 1e-5);
        assert!((c[0][1][1] + 2.0).abs() < 1e-14);
        assert!((c[1][0][1] - 0.5).abs() < 1e-14);
        assert!((oracle[0][1][1] + 2.0).abs() < 1e-8);
        assert!((oracle[1][0][1] - 0.5).abs() < 1e-8);
        assert_eq!(c[1][0][1], c[1][1][0]);
    }

    #[test]
    fn warped_line_christoffels() {
        let g = metric(&["y", "z"], &[&["1", "0"], &["0", "y^4"]]);
        let p = [1.0, 0.0];
        let c = christoffel(&g, &p).unwrap();
        let oracle = christoffel_fd(&g, &p, 1e-5);
        assert!((c[0][1][1] + 2.0).abs() < 1e-14);
        assert!((c[1][0][1] - 2.0).abs() < 1e-14);
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    assert!((c[k][i][j] - oracle[k][i][j]).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn sphere_and_hyperbolic_curvature() {
        let s = MetricField::sphere2();
        let p = [std::f64::consts::FRAC_PI_3, 0.2];
        assert!((sectional_curvature(&s, &p, 0, 1).unwrap() - 1.0).abs() < 1e-12);
        let r = riemann(&s, &p).unwrap();
        let brute = riemann_fd(&s, &p, 0, 1, 0, 1);
        assert!((r.get(0, 1, 0, 1) - brute).abs() < 1e-5, "{} vs {brute}", r.get(0, 1, 0, 1));
        let h = MetricField::hyperbolic2();
        let q = [0.0, 1.0];
        assert!((sectional_curvature(&h, &q, 0, 1).unwrap() + 1.0).abs() < 1e-12);
        let brute = riemann_fd(&h, &q, 1, 0, 1, 0);
        assert!((riemann(&h, &q).unwrap().get(1, 0, 1, 0) - brute).abs() < 1e-5);
        let flat = riemann(&MetricField::euclidean(2), &[0.3, 0.1]).unwrap();
        assert!(flat.data.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn ricci_signs() {
        let s = MetricField::sphere2();
        let p = [1.1, 0.0];
        let ric = ricci(&s, &p).unwrap();
        let gv = s.eval_values(&p).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((ric[i][j] - gv[i][j]).abs() < 1e-12);
            }
        }
        let x = TangentVector::new(p.to_vec(), vec![0.3, -0.7]).unwrap();
        let rx = ricci_op(&s, &p, &x).unwrap();
        assert!((rx.components[0] - 0.3).abs() < 1e-12 && (rx.components[1] + 0.7).abs() < 1e-12);
        let h = MetricField::hyperbolic2();
        let q = [0.5, 2.0];
        let x = TangentVector::new(q.to_vec(), vec![1.5, 0.25]).unwrap();
        let rx = ricci_op(&h, &q, &x).unwrap();
        assert!((rx.components[0] + 1.5).abs() < 1e-12 && (rx.components[1] + 0.25).abs() < 1e-12);
        let c = curvature(&h, &q).unwrap();
        assert!((c.ricci_op[0][0] + 1.0).abs() < 1e-12 && c.ricci_op[0][1].abs() < 1e-12);
        let flat = ricci(&MetricField::euclidean(3), &[1.0, 2.0, 3.0]).unwrap();
        assert!(flat.iter().flatten().all(|&x| x == 0.0));
    }

    #[test]
    fn riemann_antisymmetry() {
        let g = metric(&["u", "v"], &[&["1 + u^2", "u*v"], &["u*v", "2 + sin(v)"]]);
        let r = riemann(&g, &[0.3, 0.7]).unwrap();
        for l in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        assert!((r.get(l, i, j, k) + r.get(l, j, i, k)).abs() < 1e-12);
                    }
                }
            }
        }
        let ric = ricci(&g, &[0.3, 0.7]).unwrap();
        assert!((ric[0][1] - ric[1][0]).abs() < 1e-12);
    }

    #[test]
    fn scalar_operators() {
        let flat = MetricField::euclidean_with_vars(vec!["x".into(), "y".into()]);
        assert!((laplacian(&flat, &e("x^2+y^2"), &[0.3, -1.2]).unwrap() - 4.0).abs() < 1e-14);
        let lam = e("2*ln(y)");
        let grad = gradient(&flat, &lam, &[0.0, 2.0]).unwrap();
        assert_eq!(grad.components, vec![0.0, 1.0]);
        assert!((laplacian(&flat, &lam, &[0.0, 2.0]).unwrap() + 0.5).abs() < 1e-15);
        let s = MetricField::sphere2();
        let th = 0.9;
        let lap = laplacian(&s, &e("cos(theta)"), &[th, 0.4]).unwrap();
        assert!((lap + 2.0 * th.cos()).abs() < 1e-13);
        // FD oracle: (1/sinθ) ∂θ(sinθ ∂θ f)
        let sfd = FdScheme::fixed(1e-4).unwrap();
        let flux = |q: &[f64]| q[0].sin() * -q[0].sin();
        let fd = fd_partial(flux, &[th], &[0], &sfd).unwrap() / th.sin();
        assert!((lap - fd).abs() < 1e-7);
        let h = hessian(&flat, &e("x*y"), &[1.0, 1.0]).unwrap();
        assert_eq!(h, vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(laplacian(&flat, &e("z"), &[0.0, 1.0]).is_err());
    }

    #[test]
    fn rough_laplacian_examples() {
        let flat = MetricField::euclidean_with_vars(vec!["x".into(), "y".into()]);
        let c = ExpressionField(vec![e("3"), e("-1")]);
        let r = rough_laplacian_vec(&flat, &c, &[0.2, 0.5]).unwrap();
        assert_eq!(r.components, vec![0.0, 0.0]);
        let lin = ExpressionField(vec![e("x"), e("y")]);
        assert_eq!(rough_laplacian_vec(&flat, &lin, &[0.2, 0.5]).unwrap().components, vec![0.0, 0.0]);
        let grad = GradientField(e("2*ln(y)"));
        let r = rough_laplacian_vec(&flat, &grad, &[0.0, 1.0]).unwrap();
        assert!(r.components[0].abs() < 1e-15 && (r.components[1] - 4.0).abs() < 1e-14);
        // independent route: second FD derivative of the field component 2/y
        let sfd = FdScheme::fixed(1e-3).unwrap();
        let fd = fd_partial(|q| 2.0 / q[0], &[1.0], &[0, 0], &sfd).unwrap();
        assert!((fd - 4.0).abs() < 1e-4, "{fd}");
    }

    #[test]
    fn singular_metric_is_an_error() {
        let g = metric(&["x", "y"], &[&["1", "1"], &["1", "1"]]);
        assert!(matches!(christoffel(&g, &[0.0, 0.0]), Err(Error::SingularMetric(_))));
        let g = metric(&["x"], &[&["x"]]);
        assert!(matches!(laplacian(&g, &e("x"), &[-1.0]), Err(Error::SingularMetric(_))));
    }
}
