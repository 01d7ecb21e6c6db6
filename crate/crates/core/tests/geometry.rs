#![allow(clippy::needless_range_loop)]

use biharm::autodiff::{fd_partial, FdScheme};
use biharm::biharmonic::{bochner_residual, einstein_deviation};
use biharm::expr::parse;
use biharm::geometry::{self, MetricField};
use biharm::golden::{identity_gaps, scenarios};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A non-diagonal metric on a neighbourhood of the origin in `R³`.
fn lumpy3(c: [f64; 3]) -> MetricField {
    let [a, b, d] = c;
    let entries = [
        [format!("2 + ({a})*sin(u*v)"), format!("({b})*w"), "0".to_string()],
        [format!("({b})*w"), format!("1 + u^2 + ({d})*cos(w)^2"), format!("({a})*u*v/4")],
        ["0".to_string(), format!("({a})*u*v/4"), format!("exp(({d})*u)")],
    ];
    MetricField::new(
        ["u", "v", "w"].map(String::from).to_vec(),
        entries
            .iter()
            .map(|r| r.iter().map(|s| parse(s).unwrap()).collect())
            .collect(),
    )
    .unwrap()
}

fn coeffs() -> impl Strategy<Value = [f64; 3]> {
    [-0.4f64..0.4, -0.4f64..0.4, -0.4f64..0.4]
}

fn point3() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-0.7f64..0.7, 3)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn christoffels_match_finite_differences_of_the_metric(c in coeffs(), p in point3()) {
        let g = lumpy3(c);
        let gamma = geometry::christoffel(&g, &p).unwrap();
        let ginv = biharm::geometry::linalg::inverse(&g.eval_values(&p).unwrap()).unwrap();
        let scheme = FdScheme::default();
        let dg = |i: usize, j: usize, k: usize| {
            fd_partial(|q| g.eval_values(q).unwrap()[i][j], &p, &[k], &scheme).unwrap()
        };
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    let fd: f64 = (0..3)
                        .map(|l| 0.5 * ginv[k][l] * (dg(l, i, j) + dg(l, j, i) - dg(i, j, l)))
                        .sum();
                    prop_assert!((gamma[k][i][j] - fd).abs() < 1e-7, "Γ^{k}_{i}{j}: {} vs {fd}", gamma[k][i][j]);
                }
            }
        }
    }

    #[test]
    fn curvature_symmetries_in_three_dimensions(c in coeffs(), p in point3()) {
        let g = lumpy3(c);
        let r = geometry::riemann(&g, &p).unwrap();
        let gv = g.eval_values(&p).unwrap();
        let lower = |a: usize, i: usize, j: usize, k: usize| -> f64 {
            (0..3).map(|l| gv[a][l] * r.get(l, i, j, k)).sum()
        };
        for a in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        let bianchi = r.get(a, i, j, k) + r.get(a, j, k, i) + r.get(a, k, i, j);
                        prop_assert!(bianchi.abs() < 1e-8);
                        prop_assert!((r.get(a, i, j, k) + r.get(a, j, i, k)).abs() < 1e-12);
                        // R(X,Y,Z,W) = R(Z,W,X,Y) once the upper index is lowered
                        prop_assert!((lower(a, i, j, k) - lower(j, k, a, i)).abs() < 1e-8);
                    }
                }
            }
        }
        let ric = geometry::ricci(&g, &p).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!((ric[i][j] - ric[j][i]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn gradient_identities_on_the_model_surfaces(seed in any::<u64>(), which in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = [MetricField::euclidean(2), MetricField::sphere2(), MetricField::hyperbolic2()][which].clone();
        let vars = m.vars().to_vec();
        let lambda = scenarios::random_lambda(&mut rng, &vars[0], &vars[1]);
        let p = scenarios::random_point(&mut rng, &m);
        let gaps = identity_gaps(&m, &lambda, &p).unwrap();
        prop_assert!(gaps.rough_laplacian < 1e-6, "{gaps:?}");
        prop_assert!(gaps.gradient_flow < 1e-6, "{gaps:?}");
        prop_assert!(gaps.bochner < 1e-4, "{gaps:?}");
        prop_assert!(gaps.compatibility < 1e-8, "{gaps:?}");
    }

    #[test]
    fn gradient_identities_on_a_curved_three_manifold(c in coeffs(), p in point3(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = lumpy3(c);
        let lambda = scenarios::random_lambda(&mut rng, "u", "w");
        let gaps = identity_gaps(&g, &lambda, &p).unwrap();
        prop_assert!(gaps.rough_laplacian < 1e-6, "{gaps:?}");
        prop_assert!(gaps.gradient_flow < 1e-6, "{gaps:?}");
        prop_assert!(gaps.bochner < 1e-4, "{gaps:?}");
        prop_assert!(gaps.bianchi < 1e-8, "{gaps:?}");
        prop_assert!(gaps.compatibility < 1e-8, "{gaps:?}");
    }
}

#[test]
fn model_surfaces_are_einstein() {
    for (m, a, p) in [
        (MetricField::sphere2(), 1.0, vec![1.1, 0.4]),
        (MetricField::hyperbolic2(), -1.0, vec![0.3, 1.7]),
        (MetricField::euclidean(3), 0.0, vec![0.1, 0.2, 0.3]),
    ] {
        assert!(einstein_deviation(&m, a, &p).unwrap() < 1e-12, "{}", m.label());
        assert!(einstein_deviation(&m, a + 0.5, &p).unwrap() > 0.49);
    }
}

#[test]
fn sphere_sectional_curvature_is_one_everywhere() {
    for theta in [0.3, 1.0, std::f64::consts::FRAC_PI_3, 2.5] {
        let k = geometry::sectional_curvature(&MetricField::sphere2(), &[theta, 0.7], 0, 1).unwrap();
        assert!((k - 1.0).abs() < 1e-12);
    }
    let k = geometry::sectional_curvature(&MetricField::hyperbolic2(), &[0.0, 2.0], 0, 1).unwrap();
    assert!((k + 1.0).abs() < 1e-12);
}

#[test]
fn bochner_hand_examples() {
    let flat = MetricField::euclidean(2);
    let r = bochner_residual(&flat, &parse("x1^2 + x2^2").unwrap(), &[0.3, -0.2]).unwrap();
    assert!(r.abs() < 1e-12);
    let r = bochner_residual(&flat, &parse("3*x1 - x2").unwrap(), &[0.3, -0.2]).unwrap();
    assert!(r.abs() < 1e-12);
}

#[test]
fn laplacian_of_spherical_harmonics() {
    let s = MetricField::sphere2();
    let f = parse("3*cos(theta)^2 - 1").unwrap();
    let p = [0.8, 0.1];
    let lap = geometry::laplacian(&s, &f, &p).unwrap();
    let v = 3.0 * 0.8f64.cos().powi(2) - 1.0;
    assert!((lap + 6.0 * v).abs() < 1e-12);
}
