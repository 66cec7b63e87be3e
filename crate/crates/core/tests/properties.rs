mod common;

use common::{gauge_by_bisection, iv_bergman_from_kernel, shipped_metrics, tensor_by_differences, type_i_geodesic};
use finsler_core::automorphisms::{isotropy_element, random_automorphism};
use finsler_core::comparison::caratheodory;
use finsler_core::curvature::{bisectional_origin, hsc_origin};
use finsler_core::metrics::geodesic;
use finsler_core::schwarz::schwarz_check;
use finsler_core::{ComplexMatrix, DomainSpec, HoloMap, MetricSpec, C64};
use proptest::prelude::*;

fn domains() -> Vec<DomainSpec> {
    vec![
        DomainSpec::type_i(2, 3).unwrap(),
        DomainSpec::type_i(3, 3).unwrap(),
        DomainSpec::type_ii(3).unwrap(),
        DomainSpec::type_iii(4).unwrap(),
        DomainSpec::type_iii(5).unwrap(),
        DomainSpec::type_iv(4).unwrap(),
    ]
}

fn domain() -> impl Strategy<Value = DomainSpec> {
    (0..domains().len()).prop_map(|i| domains()[i])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn homogeneity(d in domain(), seed in any::<u64>(), re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let lam = C64::new(re, im);
        prop_assume!(lam.norm() > 1e-3);
        let z = d.sample_point(seed);
        let v = d.sample_tangent(seed ^ 1);
        for m in shipped_metrics(d) {
            let a = m.eval(&z, &v.scale(lam)).unwrap();
            let b = lam.norm() * m.eval(&z, &v).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0), "{}", m.label());
        }
    }

    #[test]
    fn invariance(d in domain(), seed in any::<u64>()) {
        let f = random_automorphism(&d, seed).unwrap();
        let z = d.sample_point(seed ^ 2);
        let v = d.sample_tangent(seed ^ 3);
        let (fz, fv) = (f.apply(&z).unwrap(), f.differential(&z, &v).unwrap());
        for m in shipped_metrics(d) {
            let a = m.eval(&z, &v).unwrap();
            let b = m.eval(&fz, &fv).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a, "{}: {a} vs {b}", m.label());
        }
        let a = caratheodory(&d, &z, &v).unwrap();
        let b = caratheodory(&d, &fz, &fv).unwrap();
        prop_assert!((a - b).abs() <= 1e-8 * a);
    }

    #[test]
    fn euler_contraction(d in domain(), seed in any::<u64>()) {
        let z = d.sample_point(seed);
        let v = d.sample_tangent(seed ^ 4);
        for m in shipped_metrics(d) {
            let t = m.fundamental_tensor(&z, &v).unwrap();
            prop_assert!(t.matrix.is_hermitian(1e-9));
            let f2 = m.eval_sq(&z, &v).unwrap();
            prop_assert!((t.contract(&d.pack(&v)) - f2).abs() <= 1e-7 * f2);
            prop_assert!(t.min_eigenvalue().unwrap() > 0.0);
        }
    }

    #[test]
    fn gauge_matches_bisection(d in domain(), seed in any::<u64>()) {
        let v = d.sample_tangent(seed);
        let g = d.gauge(&v);
        prop_assert!((g - gauge_by_bisection(&d, &v)).abs() <= 1e-9 * g);
        prop_assert!((d.gauge(&v.scale_real(0.5 / g)) < 1.0) == d.contains(&v.scale_real(0.5 / g)).unwrap());
    }

    #[test]
    fn curvature_is_unitarily_invariant(d in domain(), seed in any::<u64>()) {
        let v = d.sample_tangent(seed);
        let w = d.sample_tangent(seed ^ 5);
        let u = isotropy_element(&d, seed ^ 6);
        let (uv, uw) = (u.apply(&v).unwrap(), u.apply(&w).unwrap());
        for m in shipped_metrics(d) {
            let k = hsc_origin(&m, &v).unwrap();
            prop_assert!((hsc_origin(&m, &uv).unwrap() - k).abs() <= 1e-10 * k.abs().max(1.0));
            let tol = if m.domain.kind == finsler_core::DomainKind::IV { 1e-7 } else { 1e-10 };
            let b = bisectional_origin(&m, &v, &w).unwrap();
            prop_assert!((bisectional_origin(&m, &uv, &uw).unwrap() - b).abs() <= tol);
            prop_assert!(b <= 1e-9);
        }
    }

    #[test]
    fn margins_grow_with_the_bound(seed in any::<u64>(), extra in 0.0..1.0f64) {
        let d = DomainSpec::type_i(2, 2).unwrap();
        let m = MetricSpec::bergman(d);
        let f = random_automorphism(&d, seed).unwrap();
        let a = schwarz_check(&f, &m, &m, 1.2, 10, seed).unwrap();
        let b = schwarz_check(&f, &m, &m, 1.2 + extra, 10, seed).unwrap();
        prop_assert!(b.min_margin >= a.min_margin);
    }
}

#[test]
fn tensor_matches_second_differences() {
    for d in domains() {
        for m in shipped_metrics(d) {
            let z = d.sample_point(11);
            let v = d.sample_tangent(12);
            let a = m.fundamental_tensor(&z, &v).unwrap().matrix;
            let b = tensor_by_differences(&m, &z, &v, 1e-4);
            assert!((&a - &b).max_abs() <= 1e-5 * a.max_abs(), "{}", m.label());
        }
    }
}

#[test]
fn iv_bergman_matches_kernel() {
    let d = DomainSpec::type_iv(4).unwrap();
    let m = MetricSpec::bergman(d);
    for seed in 0..20 {
        let z = d.sample_point_within(seed, 0.8);
        let v = d.sample_tangent(seed + 100);
        let a = m.eval_sq(&z, &v).unwrap();
        let b = iv_bergman_from_kernel(&z, &v);
        assert!((a - b).abs() <= 1e-5 * a, "{a} vs {b}");
    }
}

#[test]
fn iv_origin_consistency() {
    let d = DomainSpec::type_iv(5).unwrap();
    let v = d.sample_tangent(3);
    let r = v.frobenius_norm().powi(2);
    let a = MetricSpec::bergman(d).eval_sq(&d.zero(), &v).unwrap();
    assert!((a - 10.0 * r).abs() <= 1e-13 * a);
}

#[test]
fn hermitian_quadratic_detection() {
    let d = DomainSpec::type_iii(4).unwrap();
    let z = d.sample_point(1);
    let spread = |m: &MetricSpec| {
        let a = m.fundamental_tensor(&z, &d.sample_tangent(2)).unwrap().matrix;
        let b = m.fundamental_tensor(&z, &d.sample_tangent(3)).unwrap().matrix;
        (&a - &b).max_abs() / a.max_abs()
    };
    assert!(spread(&MetricSpec::bergman(d)) <= 1e-8);
    assert!(spread(&MetricSpec::tk(d, 1.0, 2).unwrap()) > 1e-3);
}

#[test]
fn geodesic_matches_type_i_equation() {
    let d = DomainSpec::type_i(2, 3).unwrap();
    let m = MetricSpec::bergman(d);
    let z0 = d.sample_point_within(5, 0.4);
    let v = d.sample_tangent(6);
    let v = v.scale_real(1.0 / m.eval(&z0, &v).unwrap());
    let path = geodesic(&m, &z0, &v, 3.0, 600).unwrap();
    let oracle = type_i_geodesic(&z0, &v, 3.0, 600);
    for (a, b) in path.points.iter().zip(&oracle) {
        assert!((a - b).max_abs() <= 1e-8);
    }
    assert!(path.points.iter().all(|z| d.contains(z).unwrap()));
}

#[test]
fn curvature_transport() {
    let d = DomainSpec::type_iv(3).unwrap();
    for m in shipped_metrics(d) {
        let z = d.sample_point(7);
        let v = d.sample_tangent(8);
        let f = random_automorphism(&d, 9).unwrap();
        let a = finsler_core::curvature::hsc(&m, &z, &v).unwrap();
        let b = finsler_core::curvature::hsc(&m, &f.apply(&z).unwrap(), &f.differential(&z, &v).unwrap()).unwrap();
        assert!((a - b).abs() <= 1e-8 * a.abs());
    }
}

#[test]
fn origin_reduction_reproduces_general_margins() {
    // f ∘ Φ⁻¹ with Φ normalizing Z: margin at (0; Φ_*V) equals the margin
    // at (Z; V)
    let d = DomainSpec::type_i(2, 2).unwrap();
    let m = MetricSpec::tk(d, 1.0, 2).unwrap();
    let f = random_automorphism(&d, 21).unwrap();
    let z = d.sample_point(22);
    let v = d.sample_tangent(23);
    let phi = finsler_core::automorphisms::normalizing_automorphism(&d, &z).unwrap();
    let g = HoloMap::compose(f.clone(), phi.invert().unwrap()).unwrap();
    let w = phi.differential(&z, &v).unwrap();
    let lhs = m.eval(&f.apply(&z).unwrap(), &f.differential(&z, &v).unwrap()).unwrap() / m.eval(&z, &v).unwrap();
    let zero = ComplexMatrix::zeros(2, 2);
    let rhs = m
        .eval(&g.apply(&zero).unwrap(), &g.differential(&zero, &w).unwrap())
        .unwrap()
        / m.eval(&zero, &w).unwrap();
    assert!((lhs - rhs).abs() <= 1e-8);
}
