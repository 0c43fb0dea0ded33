use proptest::prelude::*;

use orthocub::domains::{default_ball_union, default_spline_element, DEMO_HALTON_COUNT};
use orthocub::geometry::halton_in_box;
use orthocub::moments::{spline_cheb_moments_with_nodes, spline_nodes_per_piece};
use orthocub::quadrature::gauss_legendre;
use orthocub::{
    apply_rule, bounding_box, diff_weights, differentiation_matrix, discrete_moments,
    hyperinterp_weights, map_rule, orthocub_weights, qmc_union_balls, spline_cheb_moments, startup,
    BoundingBox, DerivativeOrder, DiscreteMeasure, PointSet, PointWeighting, RuleKind,
    SplineBoundary,
};

/// `1/2 oint (x dy - y dx)` by Gauss-Legendre on each piece.
fn green_area(s: &SplineBoundary) -> f64 {
    let (g, w) = gauss_legendre(8);
    s.pieces
        .iter()
        .map(|p| {
            g.iter()
                .zip(&w)
                .map(|(&t, &wt)| {
                    let u = 0.5 * (t + 1.0);
                    let (xy, d) = (p.eval(u), p.derivative(u));
                    0.25 * wt * (xy[0] * d[1] - xy[1] * d[0])
                })
                .sum::<f64>()
        })
        .sum()
}

#[test]
fn spline_rule_integrates_constants_to_area() {
    let s = default_spline_element().unwrap();
    let bbox = bounding_box(&s, 0.0).unwrap();
    let area = green_area(&s);
    for n in [1, 4, 9, 16] {
        let b = startup(2, n, RuleKind::NearMinimal).unwrap();
        let rule = orthocub_weights(
            &b,
            &bbox,
            &spline_cheb_moments(&s, &bbox, &b.basis).unwrap(),
        )
        .unwrap();
        let total = apply_rule(&rule, &vec![1.0; rule.len()]).unwrap();
        assert!(
            (total - area).abs() <= 1e-12 * area,
            "n={n}: {total} vs {area}"
        );
    }
}

#[test]
fn spline_moments_converged_at_formula_node_count() {
    let s = default_spline_element().unwrap();
    let bbox = bounding_box(&s, 0.0).unwrap();
    for n in [2, 7, 16] {
        let b = startup(2, n, RuleKind::NearMinimal).unwrap();
        let k = spline_nodes_per_piece(n);
        let m1 = spline_cheb_moments_with_nodes(&s, &bbox, &b.basis, k).unwrap();
        let m2 = spline_cheb_moments_with_nodes(&s, &bbox, &b.basis, 2 * k).unwrap();
        let scale = m2.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for (a, c) in m1.values.iter().zip(&m2.values) {
            assert!((a - c).abs() <= 1e-13 * scale, "n={n}");
        }
    }
}

#[test]
fn qmc_retention_and_exactness() {
    let balls = default_ball_union().unwrap();
    let (measure, bbox) = qmc_union_balls(&balls, DEMO_HALTON_COUNT).unwrap();
    assert!(measure.len() > 37000, "K = {}", measure.len());
    let b = startup(3, 6, RuleKind::NearMinimal).unwrap();
    let m = discrete_moments(&measure, &bbox, &b.basis).unwrap();
    let rule = orthocub_weights(&b, &bbox, &m).unwrap();
    let f = |p: &[f64]| (1.0 + 0.3 * p[0] - 0.7 * p[1] + 0.2 * p[2]).powi(6);
    let direct = measure.apply(f);
    assert!((rule.integrate(f) - direct).abs() <= 1e-12 * direct.abs());
}

#[test]
fn discrete_moments_are_scheduling_independent() {
    let balls = default_ball_union().unwrap();
    let (measure, bbox) = qmc_union_balls(&balls, 20_000).unwrap();
    let b = startup(3, 5, RuleKind::NearMinimal).unwrap();
    let m1 = discrete_moments(&measure, &bbox, &b.basis).unwrap();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let m2 = pool.install(|| discrete_moments(&measure, &bbox, &b.basis).unwrap());
    assert_eq!(m1.values, m2.values);
}

#[test]
fn differentiation_matrix_identities() {
    for d in [2, 3] {
        let bbox = BoundingBox::reference(d);
        let n = 6;
        let b = startup(d, n, RuleKind::NearMinimal).unwrap();
        let (nodes, _) = map_rule(&b, &bbox).unwrap();
        for k in 0..d {
            let dk = differentiation_matrix(&b, &bbox, k).unwrap();
            let ones = nalgebra::DVector::from_element(nodes.len(), 1.0);
            assert!((&dk * &ones).amax() <= 1e-12);
            let xk = nalgebra::DVector::from_iterator(nodes.len(), nodes.iter().map(|p| p[k]));
            assert!((&dk * &xk - &ones).amax() <= 1e-12);
            // f in P_n: D_k^2 f matches the exact second derivative
            let f =
                |p: &[f64]| (0.4 + 0.3 * p[0] + 0.2 * p[1]).powi(n as i32) + p[k].powi(n as i32);
            let fv = nalgebra::DVector::from_iterator(nodes.len(), nodes.iter().map(f));
            let d2 = &dk * (&dk * &fv);
            let c = [0.3, 0.2, 0.0][k];
            let nf = n as f64;
            let exact = nalgebra::DVector::from_iterator(
                nodes.len(),
                nodes.iter().map(|p| {
                    nf * (nf - 1.0)
                        * (c * c * (0.4 + 0.3 * p[0] + 0.2 * p[1]).powi(n as i32 - 2)
                            + p[k].powi(n as i32 - 2))
                }),
            );
            assert!((d2 - &exact).norm() <= 1e-10 * exact.norm(), "d={d} k={k}");
        }
        assert!(differentiation_matrix(&b, &bbox, d).is_err());
    }
}

fn arb_box2() -> impl Strategy<Value = BoundingBox> {
    prop::collection::vec((-2.0f64..2.0, 0.1f64..3.0), 2).prop_map(|v| {
        BoundingBox::new(
            v.iter().map(|p| p.0).collect(),
            v.iter().map(|p| p.0 + p.1).collect(),
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn derivative_weights_examples(bbox in arb_box2(), t in prop::collection::vec(0.0f64..1.0, 2), n in 1usize..10) {
        let b = startup(2, n, RuleKind::NearMinimal).unwrap();
        let (nodes, _) = map_rule(&b, &bbox).unwrap();
        let p: Vec<f64> = (0..2).map(|k| bbox.lo()[k] + t[k] * (bbox.hi()[k] - bbox.lo()[k])).collect();
        let dx = diff_weights(&b, &bbox, &p, &DerivativeOrder::first(2, 0).unwrap()).unwrap();
        let got: f64 = dx.weights.iter().zip(nodes.iter()).map(|(w, q)| w * q[0]).sum();
        prop_assert!((got - 1.0).abs() <= 1e-11);
        let dxx = diff_weights(&b, &bbox, &p, &DerivativeOrder::new(&[2, 0]).unwrap()).unwrap();
        let got: f64 = dxx.weights.iter().zip(nodes.iter()).map(|(w, q)| w * (2.0 - q[0] + 3.0 * q[1])).sum();
        prop_assert!(got.abs() <= 1e-9);
    }

    #[test]
    fn dirac_path_equals_hyperinterpolation(bbox in arb_box2(), t in prop::collection::vec(0.0f64..1.0, 2), n in 0usize..12) {
        let b = startup(2, n, RuleKind::NearMinimal).unwrap();
        let p: Vec<f64> = (0..2).map(|k| bbox.lo()[k] + t[k] * (bbox.hi()[k] - bbox.lo()[k])).collect();
        let measure = DiscreteMeasure::new(PointSet::from_rows(2, std::slice::from_ref(&p)).unwrap(), PointWeighting::Uniform(1.0)).unwrap();
        let rule = orthocub_weights(&b, &bbox, &discrete_moments(&measure, &bbox, &b.basis).unwrap()).unwrap();
        let h = hyperinterp_weights(&b, &bbox, &p).unwrap();
        for (a, c) in rule.weights.iter().zip(&h.weights) {
            prop_assert!((a - c).abs() <= 1e-14);
        }
    }

    #[test]
    fn derivative_weights_exact_on_pn(
        n in 2usize..9,
        c in prop::collection::vec(0.0f64..1.0, 4),
        a in prop::collection::vec(0usize..2, 3),
    ) {
        let bbox = BoundingBox::new(vec![-0.5, 0.0, 1.0], vec![1.5, 0.5, 2.0]).unwrap();
        prop_assume!(a.iter().sum::<usize>() <= 2);
        let alpha = DerivativeOrder::new(&a).unwrap();
        let b = startup(3, n, RuleKind::NearMinimal).unwrap();
        let (nodes, _) = map_rule(&b, &bbox).unwrap();
        let lin = |p: &[f64]| c[0] + c[1] * p[0] + c[2] * p[1] + c[3] * p[2];
        let probes = halton_in_box(&bbox, 5, 1).unwrap();
        for p in probes.iter() {
            let w = diff_weights(&b, &bbox, p, &alpha).unwrap();
            let got: f64 = w.weights.iter().zip(nodes.iter()).map(|(w, q)| w * lin(q).powi(n as i32)).sum();
            let ord = alpha.order() as i32;
            let falling: f64 = (0..ord).map(|k| (n as i32 - k) as f64).product();
            let coef: f64 = a.iter().zip(&c[1..]).map(|(&e, &ci)| ci.powi(e as i32)).product();
            let exact = falling * coef * lin(p).powi(n as i32 - ord);
            prop_assert!((got - exact).abs() <= 1e-10 * exact.abs().max(1.0));
        }
    }
}
