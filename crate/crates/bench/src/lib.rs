//! Fixed inputs for the benchmarks.

use finsler_core::automorphisms::random_automorphism;
use finsler_core::{ComplexMatrix, DomainSpec, HoloMap, MetricSpec, PhiFamily};

pub struct Fixture {
    pub name: &'static str,
    pub metric: MetricSpec,
    pub z: ComplexMatrix,
    pub v: ComplexMatrix,
    pub map: HoloMap,
}

fn fixture(name: &'static str, metric: MetricSpec) -> Fixture {
    let d = metric.domain;
    Fixture {
        name,
        z: d.sample_point(1),
        v: d.sample_tangent(2),
        map: random_automorphism(&d, 3).expect("seeded automorphism"),
        metric,
    }
}

/// One metric per domain type at desk scale.
pub fn fixtures() -> Vec<Fixture> {
    let i = DomainSpec::type_i(3, 3).unwrap();
    let ii = DomainSpec::type_ii(3).unwrap();
    let iii = DomainSpec::type_iii(4).unwrap();
    let iv = DomainSpec::type_iv(5).unwrap();
    vec![
        fixture("bergman_I33", MetricSpec::bergman(i)),
        fixture("tk_I33", MetricSpec::tk(i, 1.0, 2).unwrap()),
        fixture("tk_II3", MetricSpec::tk(ii, 1.0, 2).unwrap()),
        fixture("tk_III4", MetricSpec::tk(iii, 1.0, 2).unwrap()),
        fixture(
            "affine_IV5",
            MetricSpec::phi(iv, PhiFamily::affine(0.5).unwrap()).unwrap(),
        ),
    ]
}
