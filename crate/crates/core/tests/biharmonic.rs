#![allow(clippy::needless_range_loop)]

use biharm::biharmonic::{
    bitension_basic, bitension_general, einstein_first_integral, integrability_residuals,
    integrability_residuals_expanded, twisted_residual, warped_residual, wo_n2_residuals,
    WoVariant,
};
use biharm::expr::{parse, Expression};
use biharm::geometry::MetricField;
use biharm::golden::{scenarios, twisted_laplacian};
use biharm::submersion::SubmersionModel;
use biharm::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn e(s: &str) -> Expression {
    parse(s).unwrap()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn rel_gap(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&d) / norm(a).max(norm(b)).max(1.0)
}

fn base(which: usize) -> MetricField {
    [MetricField::euclidean(2), MetricField::sphere2(), MetricField::hyperbolic2()][which].clone()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 30, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn warped_criteria_agree(seed in any::<u64>(), which in 0usize..3, k in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = base(which);
        let vars = b.vars().to_vec();
        let lambda = scenarios::random_lambda(&mut rng, &vars[0], &vars[1]);
        let model = SubmersionModel::warped(b.clone(), k, lambda.clone()).unwrap();
        let q = scenarios::random_point(&mut rng, &b);
        let fiber: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let p = model.total_point(&q, &fiber).unwrap();
        let general = bitension_general(&model, &p).unwrap().components;
        let basic = bitension_basic(&model, &p).unwrap().components;
        let wp: Vec<f64> = warped_residual(&b, &lambda, k, &q)
            .unwrap()
            .components
            .iter()
            .map(|c| k as f64 * c)
            .collect();
        prop_assert!(rel_gap(&general, &basic) < 1e-6, "{general:?} vs {basic:?}");
        prop_assert!(rel_gap(&basic, &wp) < 1e-6, "{basic:?} vs {wp:?}");
    }

    #[test]
    fn general_equation_matches_one_dimensional_fiber_form(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = scenarios::random_twisted(&mut rng, n);
        let p: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let general = bitension_general(&model, &p).unwrap().components;
        let one_dim: Vec<f64> = integrability_residuals(&model, &p)
            .unwrap()
            .components
            .iter()
            .map(|c| -c)
            .collect();
        prop_assert!(rel_gap(&general, &one_dim) < 1e-9, "{general:?} vs {one_dim:?}");
        let SubmersionModel::TwistedProduct { lambda, .. } = &model else { unreachable!() };
        for i in 0..n {
            let t = twisted_residual(lambda, &p, i).unwrap();
            prop_assert!((t + general[i]).abs() < 1e-9 * t.abs().max(1.0));
            prop_assert!((t - twisted_laplacian(&model, &p, i).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn surface_equations_agree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = scenarios::random_conformal_surface(&mut rng);
        let p: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let general = integrability_residuals(&model, &p).unwrap().components;
        let expanded = integrability_residuals_expanded(&model, &p).unwrap();
        let pair = wo_n2_residuals(&model, &p, WoVariant::Corrected).unwrap();
        prop_assert!(rel_gap(&general, &expanded) < 1e-10);
        prop_assert!((general[0] - pair[0]).abs() < 1e-9 && (general[1] - pair[1]).abs() < 1e-9,
            "{general:?} vs {pair:?}");
        let printed = wo_n2_residuals(&model, &p, WoVariant::AsPrinted).unwrap();
        prop_assert_eq!(printed[0], pair[0]);
        let tau2 = bitension_general(&model, &p).unwrap().components;
        prop_assert!(rel_gap(&tau2, &[-general[0], -general[1]]) < 1e-9);
    }

    #[test]
    fn warped_residual_ignores_additive_constants(seed in any::<u64>(), c in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = MetricField::sphere2();
        let lambda = scenarios::random_lambda(&mut rng, "theta", "phi");
        let shifted = lambda.clone().add(Expression::constant(c));
        let q = scenarios::random_point(&mut rng, &s);
        let a = warped_residual(&s, &lambda, 2, &q).unwrap().components;
        let b = warped_residual(&s, &shifted, 2, &q).unwrap().components;
        prop_assert!(rel_gap(&a, &b) < 1e-12);
        let fa = einstein_first_integral(&lambda, 1.0, 2, &s, &q).unwrap();
        let fb = einstein_first_integral(&shifted, 1.0, 2, &s, &q).unwrap();
        prop_assert!((fb - fa - 2.0 * c).abs() < 1e-10 * fa.abs().max(1.0));
    }
}

#[test]
fn harmonic_models_have_zero_residual_everywhere() {
    let w = SubmersionModel::warped(MetricField::sphere2(), 2, e("1.5")).unwrap();
    let p = [1.0, 0.3, 0.2, -0.4];
    assert!(bitension_general(&w, &p).unwrap().norm < 1e-10);
    assert!(bitension_basic(&w, &p).unwrap().norm < 1e-10);
    assert!(warped_residual(&MetricField::sphere2(), &e("1.5"), 2, &[1.0, 0.3]).unwrap().norm < 1e-10);
    let t = SubmersionModel::twisted(2, e("0")).unwrap();
    assert!(integrability_residuals(&t, &[0.1, 0.2, 0.3]).unwrap().norm < 1e-10);
    let t = SubmersionModel::twisted(2, e("sin(t) + t^2")).unwrap();
    assert!(integrability_residuals(&t, &[0.1, 0.2, 0.3]).unwrap().norm < 1e-10);
    for i in 0..2 {
        assert!(twisted_residual(&e("sin(t) + t^2"), &[0.1, 0.2, 0.3], i).unwrap().abs() < 1e-10);
    }
    let zero = scenarios::conformal_surface([0.0; 3], [0.0; 4]);
    assert_eq!(wo_n2_residuals(&zero, &[0.3, 0.1, 0.2], WoVariant::AsPrinted).unwrap(), [0.0, 0.0]);
}

#[test]
fn linear_warping_on_flat_base_is_biharmonic() {
    let r = warped_residual(&scenarios::flat_xy(), &e("y"), 1, &[0.3, 0.7]).unwrap();
    assert!(r.norm < 1e-14);
}

#[test]
fn logarithmic_warping_closed_form() {
    // λ = c ln y: the warped residual is (0, (2c − c²)/y³)
    let flat = scenarios::flat_xy();
    for (c, y) in [(2.0, 1.0), (2.25, 1.0), (2.1, 0.5), (1.0, 2.0), (3.0, 1.3)] {
        let r = warped_residual(&flat, &e(&format!("{c}*ln(y)")), 1, &[0.0, y]).unwrap();
        let expect = (2.0 * c - c * c) / (y * y * y);
        assert!(r.components[0].abs() < 1e-14);
        assert!((r.components[1] - expect).abs() < 1e-12 * expect.abs().max(1.0), "c={c}: {r:?}");
    }
    let model = SubmersionModel::warped(flat, 1, e("2.25*ln(y)")).unwrap();
    assert!(bitension_general(&model, &[0.0, 1.0, 0.0]).unwrap().norm > 0.1);
}

#[test]
fn perturbation_onset_is_monotone_at_y_one() {
    let flat = scenarios::flat_xy();
    let mut prev = 0.0;
    for eps in [0.05, 0.1, 0.25] {
        let r = warped_residual(&flat, &scenarios::perturbed_exponent(eps), 1, &[0.0, 1.0])
            .unwrap()
            .norm;
        let c: f64 = 2.0 + eps;
        assert!((r - (c * c - 2.0 * c)).abs() < 1e-12);
        assert!(r > prev);
        prev = r;
    }
    assert!(prev > 1e-2);
}

#[test]
fn twisted_hand_example() {
    // λ = x₁² t at (1, 2, 0): only −e^{−2λ} λ_t ∂_t κ₁ = 2x₁³ survives
    let lam = e("x1^2*t");
    assert!((twisted_residual(&lam, &[1.0, 2.0, 0.0], 0).unwrap() - 2.0).abs() < 1e-12);
    assert!(twisted_residual(&lam, &[1.0, 2.0, 0.0], 1).unwrap().abs() < 1e-14);
    let m = SubmersionModel::twisted(2, lam).unwrap();
    assert!((twisted_laplacian(&m, &[1.0, 2.0, 0.0], 0).unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn einstein_first_integral_examples() {
    let flat = MetricField::euclidean(2);
    let lam = e("2*ln(x1 + 0.3) + 2*ln(x2 - 0.1)");
    for p in [[0.5, 0.5], [1.0, 2.0], [2.5, 0.9]] {
        assert!(einstein_first_integral(&lam, 0.0, 1, &flat, &p).unwrap().abs() < 1e-12);
    }
    let (a1, a2) = (1.2, 0.7);
    let lam = e(&format!("2*ln(cos({}*(x1))) + 2*ln(cos({}*(x2 + 0.2)))", a1 / 2.0, a2 / 2.0));
    let expect = -(a1 * a1 + a2 * a2) / 2.0;
    for p in [[0.1, 0.3], [-1.0, 1.5], [1.2, -0.8]] {
        let v = einstein_first_integral(&lam, 0.0, 1, &flat, &p).unwrap();
        assert!((v - expect).abs() < 1e-12, "{v} vs {expect}");
    }
    assert!(einstein_first_integral(&e("0"), 0.0, 1, &flat, &[0.2, 0.2]).unwrap() == 0.0);
    assert!(matches!(
        einstein_first_integral(&e("theta"), 0.0, 1, &MetricField::sphere2(), &[1.0, 0.0]),
        Err(Error::NotEinstein { .. })
    ));
}

#[test]
fn squared_sinh_warping_is_not_biharmonic() {
    let flat = MetricField::euclidean(1);
    let r = warped_residual(&flat, &e("ln(sinh(x1))"), 1, &[1.0]).unwrap().components[0];
    // d/dx[−csch²x + ½coth²x] = 2csch²x·coth x − coth x·csch²x = coth x·csch²x
    let (s, c) = (1.0f64.sinh(), 1.0f64.cosh());
    let expect = c / (s * s * s);
    assert!((r - expect).abs() < 1e-12, "{r} vs {expect}");
    let r4 = warped_residual(&flat, &e("2*ln(sinh(x1))"), 1, &[1.0]).unwrap();
    assert!(r4.norm < 1e-12);
}

#[test]
fn twisted_models_refuse_the_basic_criterion() {
    let m = SubmersionModel::twisted(2, e("x1*t")).unwrap();
    assert!(matches!(bitension_basic(&m, &[0.4, 0.1, 0.3]), Err(Error::NonBasic(_))));
    assert!(bitension_general(&m, &[0.4, 0.1, 0.3]).is_ok());
}
