//! Model and function generators shared by the example suite and tests.

use std::collections::BTreeMap;

use rand::Rng;

use crate::expr::{parse, BinOp, Expression, Func};
use crate::geometry::MetricField;
use crate::kappa::{Case, KappaFamily};
use crate::submersion::{BaseRicci, IntegrabilityModel, SubmersionModel};

fn e(s: &str) -> Expression {
    parse(s).expect("generated expression parses")
}

/// Formats a coefficient so that negative values stay parenthesized.
fn c(v: f64) -> String {
    format!("({v})")
}

pub fn flat_xy() -> MetricField {
    MetricField::euclidean_with_vars(vec!["x".into(), "y".into()])
}

/// `dx² + dy² + C y⁴ dz²` over the upper half-plane.
pub fn quartic_warping(c: f64) -> SubmersionModel {
    let lambda = e(&format!("2*ln(y) + 0.5*ln({c})"));
    SubmersionModel::warped(flat_xy(), 1, lambda).expect("valid model")
}

/// `λ = (2 + ε) ln y` over the flat half-plane.
pub fn perturbed_exponent(eps: f64) -> Expression {
    e(&format!("(2 + {eps})*ln(y)"))
}

/// Manifest text for the quartic warping example.
pub fn quartic_manifest(c: f64) -> String {
    format!(
        r#"{{
  "model": {{"kind": "warped_product", "base": "euclidean(2)", "base_vars": ["x", "y"],
             "fiber_dim": 1, "lambda": "2*ln(y) + 0.5*ln({c})"}},
  "criteria": ["wp-warped", "bas-basic", "eq1-general"],
  "grid": ["y=0.5:4:30"],
  "fixed": {{"x": 0, "z": 0}},
  "expect": "proper-biharmonic"
}}"#
    )
}

/// A random smooth function of two chart variables mixing polynomial and
/// transcendental terms.
pub fn random_lambda<R: Rng>(rng: &mut R, u: &str, v: &str) -> Expression {
    let mut k = || c((rng.gen_range(-1.0..1.0) * 1000.0f64).round() / 1000.0);
    e(&format!(
        "{}*sin({u}) + {}*{v}^2 + {}*{u}*{v} + {}*cos({v}) + {}*exp(0.3*{u}) + {}*ln(2 + {u}^2)",
        k(),
        k(),
        k(),
        k(),
        k(),
        k()
    ))
}

/// Random point inside a comfortable region of each built-in chart.
pub fn random_point<R: Rng>(rng: &mut R, metric: &MetricField) -> Vec<f64> {
    match metric.label() {
        "sphere2" => vec![rng.gen_range(0.4..2.7), rng.gen_range(-1.5..1.5)],
        "hyperbolic2" => vec![rng.gen_range(-1.0..1.0), rng.gen_range(0.5..2.0)],
        _ => (0..metric.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    }
}

/// Random twisted product over `R^n` with `λ(x, t)` genuinely depending on
/// both base and fiber coordinates.
pub fn random_twisted<R: Rng>(rng: &mut R, n: usize) -> SubmersionModel {
    let mut terms = Vec::new();
    for i in 1..=n {
        let a = (rng.gen_range(-1.0..1.0) * 1000.0f64).round() / 1000.0;
        let b = (rng.gen_range(-1.0..1.0) * 1000.0f64).round() / 1000.0;
        let d = (rng.gen_range(-1.0..1.0) * 1000.0f64).round() / 1000.0;
        terms.push(format!("{}*x{i}*t + {}*sin(x{i} + t) + {}*x{i}^2", c(a), c(b), c(d)));
    }
    let q = (rng.gen_range(-1.0..1.0) * 1000.0f64).round() / 1000.0;
    terms.push(format!("{}*t^2", c(q)));
    SubmersionModel::twisted(n, e(&terms.join(" + "))).expect("valid model")
}

/// A 3-manifold over a conformally flat surface
/// `(R², e^{2ψ}(dx² + dy²))` with fiber metric `e^{2λ} dt²`, written with
/// frame `e^{−ψ}∂x, e^{−ψ}∂y, e^{−λ}∂t` and its integrability data:
/// `f^1_12 = e^{−ψ}ψ_y`, `f^2_12 = −e^{−ψ}ψ_x`, `κ_i = −e_i(λ)`,
/// `K = −e^{−2ψ}Δ_0ψ`.
///
/// `ψ = p₁ sin x + p₂ y² + p₃ xy` and
/// `λ = q₁ xt + q₂ cos y + q₃ x² + q₄ t² y`.
pub fn conformal_surface(p: [f64; 3], q: [f64; 4]) -> SubmersionModel {
    let [p1, p2, p3] = p.map(c);
    let [q1, q2, q3, q4] = q.map(c);
    let psi = format!("({p1}*sin(x) + {p2}*y^2 + {p3}*x*y)");
    let psi_x = format!("({p1}*cos(x) + {p3}*y)");
    let psi_y = format!("(2*{p2}*y + {p3}*x)");
    let lap_psi = format!("(-{p1}*sin(x) + 2*{p2})");
    let lam = format!("({q1}*x*t + {q2}*cos(y) + {q3}*x^2 + {q4}*t^2*y)");
    let lam_x = format!("({q1}*t + 2*{q3}*x)");
    let lam_y = format!("(-{q2}*sin(y) + {q4}*t^2)");
    let w = format!("exp(-{psi})");
    let frame = vec![
        vec![e(&w), e("0"), e("0")],
        vec![e("0"), e(&w), e("0")],
        vec![e("0"), e("0"), e(&format!("exp(-{lam})"))],
    ];
    let mut f = BTreeMap::new();
    f.insert((0, 1, 0), e(&format!("{w}*{psi_y}")));
    f.insert((0, 1, 1), e(&format!("-{w}*{psi_x}")));
    let kappa = vec![e(&format!("-{w}*{lam_x}")), e(&format!("-{w}*{lam_y}"))];
    let gauss = e(&format!("-exp(-2*{psi})*{lap_psi}"));
    let model = IntegrabilityModel::new(
        ["x", "y", "t"].map(String::from).to_vec(),
        frame,
        None,
        f,
        kappa,
        BTreeMap::new(),
        BaseRicci::Gauss(gauss),
    )
    .expect("valid model");
    SubmersionModel::IntegrabilityData(model)
}

/// Random parameters for [`conformal_surface`].
pub fn random_conformal_surface<R: Rng>(rng: &mut R) -> SubmersionModel {
    let mut r = || (rng.gen_range(-0.8..0.8) * 1000.0f64).round() / 1000.0;
    conformal_surface([r(), r(), r()], [r(), r(), r(), r()])
}

/// A random family with `a ∈ [0.5, 2]`, `b ∈ [−0.5, 0.5]`.
pub fn random_family<R: Rng>(rng: &mut R, index: usize) -> KappaFamily {
    let case = match rng.gen_range(0..3) {
        0 => Case::I,
        1 => Case::II,
        _ => Case::III,
    };
    let a = rng.gen_range(0.5..2.0);
    let b = rng.gen_range(-0.5..0.5);
    KappaFamily::new(case, Some(a), b, index).expect("valid family")
}

/// An interval for the family's coordinate kept away from poles and from
/// where the warping function is undefined.
pub fn family_interval(f: &KappaFamily) -> (f64, f64) {
    match f.case {
        Case::I | Case::III => (0.5 - f.b, 3.0 - f.b),
        Case::II => (-2.4 / f.a - f.b, 2.4 / f.a - f.b),
    }
}

/// Random expression tree over `vars` that stays finite and smooth on
/// `[−1, 1]^d`.
pub fn random_expression<R: Rng>(rng: &mut R, vars: &[&str], depth: usize) -> Expression {
    if depth == 0 || rng.gen_bool(0.2) {
        return if rng.gen_bool(0.7) {
            Expression::var(vars[rng.gen_range(0..vars.len())])
        } else {
            Expression::constant((rng.gen_range(-1.5..1.5) * 100.0f64).round() / 100.0)
        };
    }
    let sub = |rng: &mut R| random_expression(rng, vars, depth - 1);
    match rng.gen_range(0..11) {
        0 => Expression::call(Func::Sin, sub(rng)),
        1 => Expression::call(Func::Cos, sub(rng)),
        2 => Expression::call(Func::Tanh, sub(rng)),
        3 => Expression::call(Func::Exp, Expression::constant(0.5).mul(sub(rng))),
        4 => {
            let s = sub(rng);
            Expression::call(Func::Ln, Expression::constant(1.5).add(s.clone().mul(s)))
        }
        5 => Expression::call(
            Func::Sqrt,
            Expression::constant(2.0).add(Expression::call(Func::Sin, sub(rng))),
        ),
        6 => sub(rng).add(sub(rng)),
        7 => sub(rng).sub(sub(rng)),
        8 => sub(rng).mul(sub(rng)),
        9 => {
            let d = sub(rng);
            sub(rng).div(Expression::constant(1.5).add(d.clone().mul(d)))
        }
        _ => Expression::binary(
            BinOp::Pow,
            sub(rng),
            Expression::constant(rng.gen_range(2..4) as f64),
        ),
    }
}
