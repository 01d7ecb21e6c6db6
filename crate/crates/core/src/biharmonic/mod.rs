//! Pointwise residuals of the biharmonic equation for Riemannian
//! submersions, in each of its specialized forms.
//!
//! Every evaluator returns the quantity whose vanishing is equivalent to
//! biharmonicity, so `|r| < tol` is the verdict.

use std::fmt;
use std::str::FromStr;

use crate::autodiff::Jet3;
use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::geometry::{values, FieldJet, LocalGeometry, MetricField};
use crate::submersion::{
    is_basic_mean_curvature, FrameData, LocalSubmersion, SubmersionModel, FIBER_SAMPLES,
};

/// Zero threshold for residuals computed entirely with jets.
pub const AD_TOL: f64 = 1e-6;
/// Zero threshold for residuals with a finite-difference step.
pub const FD_TOL: f64 = 1e-4;
/// `|μ|` above this somewhere on a grid makes a biharmonic map proper.
pub const PROPER_TOL: f64 = 1e-9;
/// Allowed `|Ric − a·g|` when validating an Einstein base.
pub const EINSTEIN_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Criterion {
    General,
    Basic,
    Warped,
    Einstein,
    Integrability,
    Twisted,
    Bochner,
}

impl Criterion {
    pub const ALL: [Criterion; 7] = [
        Criterion::General,
        Criterion::Basic,
        Criterion::Warped,
        Criterion::Einstein,
        Criterion::Integrability,
        Criterion::Twisted,
        Criterion::Bochner,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::General => "eq1-general",
            Criterion::Basic => "bas-basic",
            Criterion::Warped => "wp-warped",
            Criterion::Einstein => "einstein",
            Criterion::Integrability => "1de-integrability",
            Criterion::Twisted => "twisted",
            Criterion::Bochner => "bochner",
        }
    }

    /// Default zero threshold.
    pub fn default_tol(self) -> f64 {
        AD_TOL
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Criterion::ALL.iter().map(|c| c.name()).collect();
                Error::InvalidModel(format!("unknown criterion `{s}`; expected one of {names:?}"))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub point: Vec<f64>,
    pub components: Vec<f64>,
    pub norm: f64,
    pub criterion: Criterion,
}

impl Residual {
    pub fn new(point: Vec<f64>, components: Vec<f64>, criterion: Criterion) -> Self {
        let norm = components.iter().map(|c| c * c).sum::<f64>().sqrt();
        Self {
            point,
            components,
            norm,
            criterion,
        }
    }
}

fn add_into(acc: &mut [Jet3], v: &[Jet3], scale: f64) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a += x.scale(scale);
    }
}

/// The bitension field `τ₂(φ)` from the general formula: the horizontal
/// and vertical second-order terms in `μ`, the `∇_μ μ` term and the base
/// Ricci curvature, pushed to the base.
pub fn bitension_general(model: &SubmersionModel, p: &[f64]) -> Result<Residual> {
    let s = LocalSubmersion::at(model, p)?;
    let g = s.geometry();
    let n = s.base_dim();
    let m = s.frame().len();
    let k = s.fiber_dim() as f64;
    let mu = s.mean_curvature();
    let mut b = vec![Jet3::constant(0.0); m];
    for e in &s.frame()[..n] {
        let dmu = s.horizontal(&g.covariant(e, &mu));
        add_into(&mut b, &g.covariant(e, &dmu), 1.0);
        let nab = g.covariant(e, e);
        add_into(&mut b, &g.covariant(&s.horizontal(&nab), &mu), -1.0);
        add_into(&mut b, &g.bracket(&mu, &s.vertical(&nab)), 1.0);
    }
    for e in &s.frame()[n..] {
        let inner = g.bracket(&mu, e);
        add_into(&mut b, &g.bracket(&inner, e), 1.0);
        let nab = g.covariant(e, e);
        add_into(&mut b, &g.bracket(&mu, &s.vertical(&nab)), 1.0);
    }
    add_into(&mut b, &g.covariant(&mu, &mu), -k);
    let beta = values(&s.horizontal_components(&b));
    let mu_h = values(&s.horizontal_components(&mu));
    let ric = s.base_ricci_frame()?;
    let tau2: Vec<f64> = (0..n)
        .map(|a| {
            let r: f64 = (0..n).map(|c| ric[a][c] * mu_h[c]).sum();
            -k * (beta[a] + r)
        })
        .collect();
    Ok(Residual::new(
        p.to_vec(),
        s.push_forward(&tau2),
        Criterion::General,
    ))
}

/// `Tr(∇^N)²τ + ∇^N_τ τ + Ric^N(τ)` on the base, for models whose fibers
/// have basic mean curvature. Refuses non-basic models.
pub fn bitension_basic(model: &SubmersionModel, p: &[f64]) -> Result<Residual> {
    let check = is_basic_mean_curvature(model, p, FIBER_SAMPLES)?;
    if !check.basic {
        return Err(Error::NonBasic(check.max_variation));
    }
    let (Some(idx), Some(base)) = (model.base_indices(), model.base_metric()) else {
        return Err(Error::Unsupported(
            "the basic criterion needs a coordinate projection onto a base chart".into(),
        ));
    };
    let s = LocalSubmersion::at(model, p)?;
    let k = s.fiber_dim() as f64;
    let mu = s.mean_curvature();
    let q: Vec<f64> = idx.iter().map(|&i| p[i]).collect();
    let bg = LocalGeometry::at(&base, &q)?;
    let tau: FieldJet = idx.iter().map(|&i| mu[i].restrict(&idx).scale(-k)).collect();
    let lap = bg.rough_laplacian(&tau);
    let adv = bg.covariant(&tau, &tau);
    let ric = bg.ricci_op(&bg.ricci(), &tau);
    let comps = (0..idx.len())
        .map(|a| lap[a].value() + adv[a].value() + ric[a].value())
        .collect();
    Ok(Residual::new(p.to_vec(), comps, Criterion::Basic))
}

/// `grad Δλ + 2 Ric(grad λ) + (n/2) grad |grad λ|²` on the base of a warped
/// product with fiber dimension `n`.
pub fn warped_residual(
    base: &MetricField,
    lambda: &Expression,
    n: usize,
    p: &[f64],
) -> Result<Residual> {
    let g = LocalGeometry::at(base, p)?;
    let lam = g.eval(lambda)?;
    let grad = g.gradient(&lam);
    let grad_lap = g.gradient(&g.laplacian(&lam));
    let ric = g.ricci_op(&g.ricci(), &grad);
    let grad_sq = g.gradient(&g.inner(&grad, &grad));
    let comps = (0..g.dim())
        .map(|a| {
            grad_lap[a].value() + 2.0 * ric[a].value() + 0.5 * n as f64 * grad_sq[a].value()
        })
        .collect();
    Ok(Residual::new(p.to_vec(), comps, Criterion::Warped))
}

/// `max |Ric^i_j − a δ^i_j|` at `p`.
pub fn einstein_deviation(metric: &MetricField, a: f64, p: &[f64]) -> Result<f64> {
    let c = crate::geometry::curvature(metric, p)?;
    let mut dev: f64 = 0.0;
    for (i, row) in c.ricci_op.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            dev = dev.max((v - if i == j { a } else { 0.0 }).abs());
        }
    }
    Ok(dev)
}

/// `Δλ + 2aλ + (n/2)|grad λ|²`, which is constant exactly when the warped
/// product over an Einstein base `Ric = a·g` is biharmonic.
pub fn einstein_first_integral(
    lambda: &Expression,
    a: f64,
    n: usize,
    metric: &MetricField,
    p: &[f64],
) -> Result<f64> {
    let dev = einstein_deviation(metric, a, p)?;
    if !(dev <= EINSTEIN_TOL) {
        return Err(Error::NotEinstein { a, deviation: dev });
    }
    let g = LocalGeometry::at(metric, p)?;
    let lam = g.eval(lambda)?;
    let grad = g.gradient(&lam);
    Ok(g.laplacian(&lam).value()
        + 2.0 * a * lam.value()
        + 0.5 * n as f64 * g.inner(&grad, &grad).value())
}

fn directional(f: &Jet3, e: &[Jet3]) -> Jet3 {
    f.along(e)
}

/// All components of the one-dimensional-fiber equation, in the frame
/// `dφ(e_1), …, dφ(e_n)`.
pub fn integrability_residuals(model: &SubmersionModel, p: &[f64]) -> Result<Residual> {
    let s = LocalSubmersion::at(model, p)?;
    let d = s.declared_data()?;
    let comps = one_dim_fiber_terms(&s, &d)?;
    Ok(Residual::new(p.to_vec(), comps, Criterion::Integrability))
}

/// The `k`-th component (zero-based) of [`integrability_residuals`].
pub fn integrability_residual(model: &SubmersionModel, p: &[f64], k: usize) -> Result<f64> {
    let r = integrability_residuals(model, p)?;
    r.components.get(k).copied().ok_or(Error::DimensionMismatch {
        expected: r.components.len(),
        found: k + 1,
    })
}

fn one_dim_fiber_terms(s: &LocalSubmersion, d: &FrameData) -> Result<Vec<f64>> {
    let g = s.geometry();
    let n = s.base_dim();
    let e = s.frame();
    let ric = s.base_ricci_frame()?;
    let kappa = &d.kappa;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut r = g.laplacian(&kappa[k]).value();
        for i in 0..n {
            for j in 0..n {
                let pkij = d.p(k, i, j);
                let mut bracket = directional(&pkij, &e[i]).value() - kappa[i].value() * pkij.value();
                for l in 0..n {
                    bracket += d.p(l, i, j).value() * d.p(k, i, l).value();
                    bracket -= d.p(l, i, i).value() * d.p(k, l, j).value();
                }
                r += 2.0 * directional(&kappa[j], &e[i]).value() * pkij.value();
                r += kappa[j].value() * bracket;
            }
        }
        r += (0..n).map(|j| kappa[j].value() * ric[j][k]).sum::<f64>();
        out.push(r);
    }
    Ok(out)
}

/// The same equation before the frame second derivatives are collected
/// into the Laplacian: `Σ_{i≤n+1} e_i e_i κ_k − Σ P^j_ii e_j κ_k − Σ κ_i e_i κ_k + …`.
pub fn integrability_residuals_expanded(model: &SubmersionModel, p: &[f64]) -> Result<Vec<f64>> {
    let s = LocalSubmersion::at(model, p)?;
    let d = s.declared_data()?;
    let n = s.base_dim();
    let e = s.frame();
    let ric = s.base_ricci_frame()?;
    let kappa = &d.kappa;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut r = 0.0;
        for ei in e.iter() {
            r += directional(&directional(&kappa[k], ei), ei).value();
        }
        for i in 0..n {
            r -= kappa[i].value() * directional(&kappa[k], &e[i]).value();
            for j in 0..n {
                let pkij = d.p(k, i, j).value();
                r -= d.p(j, i, i).value() * directional(&kappa[k], &e[j]).value();
                r += 2.0 * directional(&kappa[j], &e[i]).value() * pkij;
                r += kappa[j].value() * directional(&d.p(k, i, j), &e[i]).value();
                r -= kappa[i].value() * kappa[j].value() * pkij;
                for l in 0..n {
                    r += kappa[j].value() * d.p(l, i, j).value() * d.p(k, i, l).value();
                    r -= kappa[j].value() * d.p(l, i, i).value() * d.p(k, l, j).value();
                }
            }
        }
        r += (0..n).map(|j| kappa[j].value() * ric[j][k]).sum::<f64>();
        out.push(r);
    }
    Ok(out)
}

/// Which Laplacian leads the second of the two surface-base equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WoVariant {
    /// `Δκ₁` in both equations.
    AsPrinted,
    /// `Δκ₂` in the second equation, as the general equation requires.
    Corrected,
}

/// The pair of equations for a submersion from a 3-manifold onto a surface
/// of Gauss curvature `K`, written with `f₁ = f^1_12`, `f₂ = f^2_12`.
pub fn wo_n2_residuals(model: &SubmersionModel, p: &[f64], variant: WoVariant) -> Result<[f64; 2]> {
    let s = LocalSubmersion::at(model, p)?;
    if s.base_dim() != 2 || s.fiber_dim() != 1 {
        return Err(Error::Unsupported(
            "the surface equations need a 3-dimensional total space over a surface".into(),
        ));
    }
    let d = s.declared_data()?;
    let g = s.geometry();
    let e = s.frame();
    let gauss = s.base_ricci_frame()?[0][0];
    let (f1, f2) = (d.f(0, 0, 1), d.f(1, 0, 1));
    let (k1, k2) = (d.kappa[0], d.kappa[1]);
    let e1 = |x: &Jet3| directional(x, &e[0]).value();
    let e2 = |x: &Jet3| directional(x, &e[1]).value();
    let (f1v, f2v, k1v, k2v) = (f1.value(), f2.value(), k1.value(), k2.value());
    let q = -gauss + f1v * f1v + f2v * f2v;
    let lap1 = g.laplacian(&k1).value();
    let lap2 = match variant {
        WoVariant::AsPrinted => lap1,
        WoVariant::Corrected => g.laplacian(&k2).value(),
    };
    let first = lap1 + e1(&k2) * f1v + e2(&k2) * f2v + e1(&(k2 * f1)) + e2(&(k2 * f2))
        - k1v * k2v * f1v
        - k2v * k2v * f2v
        - k1v * q;
    let second = lap2 - e1(&k1) * f1v - e2(&k1) * f2v - e1(&(k1 * f1)) - e2(&(k1 * f2))
        + k1v * k2v * f2v
        + k1v * k1v * f1v
        - k2v * q;
    Ok([first, second])
}

/// `Δ_M κ_i` for the twisted product `g_0 + e^{2λ}dt²` in coordinate form,
/// with `κ_i = −∂λ/∂x_i`. The chart is `(x_1, …, x_n, t)`, so `p` has
/// `n + 1` entries and `i < n`.
pub fn twisted_residual(lambda: &Expression, p: &[f64], i: usize) -> Result<f64> {
    if p.len() < 2 || i + 1 >= p.len() {
        return Err(Error::DimensionMismatch {
            expected: i + 2,
            found: p.len(),
        });
    }
    let n = p.len() - 1;
    let mut vars: Vec<String> = (1..=n).map(|j| format!("x{j}")).collect();
    vars.push("t".into());
    let coords = Jet3::seed(p)?;
    let lam: Jet3 = lambda.eval(&crate::expr::Chart {
        names: &vars,
        values: &coords,
    })?;
    let kappa: Vec<Jet3> = (0..n).map(|j| -lam.partial(j)).collect();
    let ki = kappa[i];
    let w = (-lam.scale(2.0)).exp().value();
    let mut r = 0.0;
    for (j, kj) in kappa.iter().enumerate() {
        let dki = ki.partial(j);
        r += dki.partial(j).value() - kj.value() * dki.value();
    }
    let dkt = ki.partial(n);
    r += w * dkt.partial(n).value() - w * lam.partial(n).value() * dkt.value();
    Ok(r)
}

/// `½Δ|grad λ|² − |∇dλ|² − ⟨grad λ, grad Δλ⟩ − Ric(grad λ, grad λ)`.
pub fn bochner_residual(metric: &MetricField, lambda: &Expression, p: &[f64]) -> Result<f64> {
    let g = LocalGeometry::at(metric, p)?;
    let n = g.dim();
    let lam = g.eval(lambda)?;
    let grad = g.gradient(&lam);
    let lhs = 0.5 * g.laplacian(&g.inner(&grad, &grad)).value();
    let h = g.hessian(&lam);
    let ginv = g.inverse_metric();
    let mut hess_sq = 0.0;
    for i in 0..n {
        for j in 0..n {
            for a in 0..n {
                for b in 0..n {
                    hess_sq += ginv[i][a].value()
                        * ginv[j][b].value()
                        * h[i][j].value()
                        * h[a][b].value();
                }
            }
        }
    }
    let grad_lap = g.gradient(&g.laplacian(&lam));
    let cross = g.inner(&grad, &grad_lap).value();
    let ric = g.ricci();
    let mut ric_term = 0.0;
    for j in 0..n {
        for k in 0..n {
            ric_term += ric[j][k].value() * grad[j].value() * grad[k].value();
        }
    }
    Ok(lhs - hess_sq - cross - ric_term)
}
