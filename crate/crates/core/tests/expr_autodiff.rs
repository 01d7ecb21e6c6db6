use biharm::autodiff::{fd_partial, FdScheme, Jet3};
use biharm::expr::{parse, Chart, Expression};
use biharm::golden::{jet_fd_ratio, scenarios};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn names() -> Vec<String> {
    ["x1", "x2", "x3"].map(String::from).to_vec()
}

fn value(e: &Expression, p: &[f64]) -> f64 {
    e.eval(&Chart {
        names: &names(),
        values: p,
    })
    .unwrap()
}

fn jet(e: &Expression, p: &[f64]) -> Jet3 {
    let seeds = Jet3::seed(p).unwrap();
    e.eval(&Chart {
        names: &names(),
        values: &seeds,
    })
    .unwrap()
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 3)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn printed_expressions_reparse_to_the_same_function(seed in any::<u64>(), p in point()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = scenarios::random_expression(&mut rng, &["x1", "x2", "x3"], 3);
        let back = parse(&e.to_string()).unwrap();
        let (a, b) = (value(&e, &p), value(&back, &p));
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{e} -> {back}: {a} vs {b}");
    }

    #[test]
    fn jets_agree_with_finite_differences(seed in any::<u64>(), p in point()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = scenarios::random_expression(&mut rng, &["x1", "x2", "x3"], 3);
        let ratio = jet_fd_ratio(&e, &names(), &p).unwrap();
        prop_assert!(ratio < 1.0, "{e} at {p:?}: ratio {ratio}");
    }

    #[test]
    fn jet_value_matches_plain_evaluation(seed in any::<u64>(), p in point()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = scenarios::random_expression(&mut rng, &["x1", "x2", "x3"], 3);
        let (a, b) = (jet(&e, &p).value(), value(&e, &p));
        prop_assert!((a - b).abs() <= 1e-13 * a.abs().max(1.0));
    }

    #[test]
    fn product_rule_holds_to_third_order(s1 in any::<u64>(), s2 in any::<u64>(), p in point()) {
        let mut rng = ChaCha8Rng::seed_from_u64(s1);
        let f = scenarios::random_expression(&mut rng, &["x1", "x2", "x3"], 2);
        let mut rng = ChaCha8Rng::seed_from_u64(s2);
        let g = scenarios::random_expression(&mut rng, &["x1", "x2", "x3"], 2);
        let (jf, jg) = (jet(&f, &p), jet(&g, &p));
        let fg = jet(&f.clone().mul(g.clone()), &p);
        let (i, j, k) = (0, 1, 2);
        let leibniz = jf.ddd(i, j, k) * jg.value()
            + jf.dd(i, j) * jg.d(k) + jf.dd(i, k) * jg.d(j) + jf.dd(j, k) * jg.d(i)
            + jf.d(i) * jg.dd(j, k) + jf.d(j) * jg.dd(i, k) + jf.d(k) * jg.dd(i, j)
            + jf.value() * jg.ddd(i, j, k);
        prop_assert!((fg.ddd(i, j, k) - leibniz).abs() <= 1e-10 * leibniz.abs().max(1.0));
    }

    #[test]
    fn mixed_partials_are_symmetric(seed in any::<u64>(), p in point()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = scenarios::random_expression(&mut rng, &["x1", "x2", "x3"], 3);
        let j = jet(&e, &p);
        prop_assert_eq!(j.derivative(&[0, 2, 1]).unwrap(), j.derivative(&[2, 1, 0]).unwrap());
        prop_assert_eq!(j.derivative(&[1, 0]).unwrap(), j.derivative(&[0, 1]).unwrap());
    }
}

#[test]
fn known_third_derivatives() {
    let e = parse("sin(x1)*x2^2 + exp(x3)").unwrap();
    let j = jet(&e, &[0.3, 2.0, 0.5]);
    assert!((j.ddd(0, 0, 1) - (-(0.3f64).sin() * 4.0)).abs() < 1e-14);
    assert!((j.ddd(2, 2, 2) - (0.5f64).exp()).abs() < 1e-14);
    assert_eq!(j.ddd(0, 1, 2), 0.0);
}

#[test]
fn finite_difference_oracle_on_polynomial() {
    let f = |p: &[f64]| p[0].powi(3) * p[1];
    let fd = fd_partial(f, &[1.0, 2.0], &[0, 0, 1], &FdScheme::default()).unwrap();
    assert!((fd - 6.0).abs() < 1e-4);
}
