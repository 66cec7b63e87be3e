//! The Carathéodory (= Kobayashi) metric of a classical domain, the two-sided
//! comparison with an invariant metric, and the scaled Poincaré disc.

use rayon::prelude::*;
use serde::Serialize;

use crate::automorphisms::normalizing_automorphism;
use crate::curvature::{fibre_vector, profile_vector, CurvatureReport};
use crate::domains::{derive_seed, DomainSpec};
use crate::error::{domain, Result};
use crate::metrics::MetricSpec;
use crate::numkernel::{ComplexMatrix, C64};

/// Default slack of the sandwich inequalities, relative to `F²`.
pub const SANDWICH_SLACK: f64 = 1e-8;
/// Default tolerance of the equality check at the extremizers.
pub const EQUALITY_TOL: f64 = 1e-4;

/// `F_C(Z;V)`: the gauge of the vector pushed to the origin.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GaugeMetric {
    pub domain: DomainSpec,
}

impl GaugeMetric {
    pub fn new(domain: DomainSpec) -> Self {
        Self { domain }
    }

    pub fn eval(&self, z: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
        caratheodory(&self.domain, z, v)
    }
}

pub fn caratheodory(spec: &DomainSpec, z: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    spec.check_shape(v)?;
    if z.max_abs() == 0.0 {
        return Ok(spec.gauge(v));
    }
    let phi = normalizing_automorphism(spec, z)?;
    Ok(spec.gauge(&phi.differential(z, v)?))
}

/// `(2/√K₁)|v|/(1−|z|²)` on the unit disc.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PoincareDisc {
    pub k1: f64,
}

impl PoincareDisc {
    pub fn new(k1: f64) -> Result<Self> {
        if !(k1.is_finite() && k1 > 0.0) {
            return Err(domain("disc curvature constant must be positive"));
        }
        Ok(Self { k1 })
    }

    pub fn eval(&self, z: C64, v: C64) -> Result<f64> {
        let rho = 1.0 - z.norm_sqr();
        if rho <= 0.0 {
            return Err(domain("point outside the unit disc"));
        }
        Ok(2.0 / self.k1.sqrt() * v.norm() / rho)
    }

    /// Gaussian curvature `−Δ log λ / λ²` by the five-point Laplacian.
    pub fn gaussian_curvature_fd(&self, z: C64, h: f64) -> Result<f64> {
        let log_l = |w: C64| -> Result<f64> { Ok(self.eval(w, C64::new(1.0, 0.0))?.ln()) };
        let c = log_l(z)?;
        let lap = (log_l(z + h)? + log_l(z - h)? + log_l(z + C64::new(0.0, h))? + log_l(z - C64::new(0.0, h))?
            - 4.0 * c)
            / (h * h);
        let lam = self.eval(z, C64::new(1.0, 0.0))?;
        Ok(-lap / (lam * lam))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichWitness {
    pub side: String,
    pub z: ComplexMatrix,
    pub v: ComplexMatrix,
    pub f_sq: f64,
    pub gauge_sq: f64,
}

/// `4/K₁·F_C² ≤ F² ≤ 4/K₂·F_C²`; margins are relative to `F²`.
#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub metric: String,
    pub samples: usize,
    pub lower_margin: f64,
    pub upper_margin: f64,
    /// `|F² − 4F_C²/K₁|/F²` at the `K = −K₁` extremizer.
    pub lower_equality: f64,
    /// Same at the `K = −K₂` extremizer against `4/K₂`.
    pub upper_equality: f64,
    pub pass: bool,
    pub witness: Option<SandwichWitness>,
}

struct Sample {
    lower: f64,
    upper: f64,
    z: ComplexMatrix,
    v: ComplexMatrix,
    f_sq: f64,
    gauge_sq: f64,
}

pub fn verify_sandwich(
    metric: &MetricSpec,
    curvature: &CurvatureReport,
    samples: usize,
    seed: u64,
) -> Result<SandwichReport> {
    let d = metric.domain;
    let gauge = GaugeMetric::new(d);
    let (lo, hi) = (4.0 / curvature.k1, 4.0 / curvature.k2);
    let rows = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<Sample> {
            let z = if i % 10 == 0 {
                d.zero()
            } else {
                d.sample_point(derive_seed(seed, 21, i as u64))
            };
            let v = fibre_vector(&d, derive_seed(seed, 22, i as u64));
            let f_sq = metric.eval_sq(&z, &v)?;
            let g = gauge.eval(&z, &v)?;
            let gauge_sq = g * g;
            Ok(Sample {
                lower: (f_sq - lo * gauge_sq) / f_sq,
                upper: (hi * gauge_sq - f_sq) / f_sq,
                z,
                v,
                f_sq,
                gauge_sq,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let min_by = |key: fn(&Sample) -> f64| rows.iter().min_by(|a, b| key(a).total_cmp(&key(b)));
    let worst_lower = min_by(|s| s.lower);
    let worst_upper = min_by(|s| s.upper);
    let lower_margin = worst_lower.map_or(f64::INFINITY, |s| s.lower);
    let upper_margin = worst_upper.map_or(f64::INFINITY, |s| s.upper);

    let equality = |profile: &[f64], c: f64| -> Result<f64> {
        let v = profile_vector(&d, profile)?;
        let f_sq = metric.origin_sq(&v);
        let g = d.gauge(&v);
        Ok((f_sq - c * g * g).abs() / f_sq)
    };
    let lower_equality = equality(&curvature.argmin_profile, lo)?;
    let upper_equality = equality(&curvature.argmax_profile, hi)?;

    let witness = [
        ("lower", worst_lower, lower_margin),
        ("upper", worst_upper, upper_margin),
    ]
    .into_iter()
    .find(|(_, _, m)| *m < -SANDWICH_SLACK)
    .and_then(|(side, s, _)| {
        s.map(|s| SandwichWitness {
            side: side.into(),
            z: s.z.clone(),
            v: s.v.clone(),
            f_sq: s.f_sq,
            gauge_sq: s.gauge_sq,
        })
    });
    let pass = witness.is_none() && lower_equality <= EQUALITY_TOL && upper_equality <= EQUALITY_TOL;
    Ok(SandwichReport {
        metric: metric.label(),
        samples,
        lower_margin,
        upper_margin,
        lower_equality,
        upper_equality,
        pass,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphisms::random_automorphism;
    use crate::curvature::curvature_bounds;

    #[test]
    fn disc_caratheodory() {
        let d = DomainSpec::type_i(1, 1).unwrap();
        let z = C64::new(0.4, -0.3);
        let v = C64::new(0.2, 0.9);
        let got = caratheodory(
            &d,
            &ComplexMatrix::from_vec(1, 1, vec![z]),
            &ComplexMatrix::from_vec(1, 1, vec![v]),
        )
        .unwrap();
        assert!((got - v.norm() / (1.0 - z.norm_sqr())).abs() < 1e-13);
    }

    #[test]
    fn caratheodory_is_invariant() {
        for d in [
            DomainSpec::type_i(2, 3).unwrap(),
            DomainSpec::type_iii(4).unwrap(),
            DomainSpec::type_iv(3).unwrap(),
        ] {
            let f = random_automorphism(&d, 4).unwrap();
            let z = d.sample_point(1);
            let v = d.sample_tangent(2);
            let a = caratheodory(&d, &z, &v).unwrap();
            let b = caratheodory(&d, &f.apply(&z).unwrap(), &f.differential(&z, &v).unwrap()).unwrap();
            assert!((a - b).abs() < 1e-8 * a, "{d}: {a} vs {b}");
        }
    }

    #[test]
    fn poincare_values_and_curvature() {
        let p = PoincareDisc::new(3.0).unwrap();
        let one = C64::new(1.0, 0.0);
        assert!((p.eval(C64::new(0.0, 0.0), one).unwrap() - 2.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((p.eval(C64::new(0.5, 0.0), one).unwrap() - 2.0 / 3f64.sqrt() / 0.75).abs() < 1e-15);
        let k = p.gaussian_curvature_fd(C64::new(0.2, 0.3), 1e-3).unwrap();
        assert!((k + 3.0).abs() < 1e-4, "{k}");
        assert!(p.eval(one, one).is_err());
        assert!(PoincareDisc::new(0.0).is_err());
    }

    #[test]
    fn sandwich_bergman_and_tk() {
        for m in [
            MetricSpec::bergman(DomainSpec::type_i(2, 2).unwrap()),
            MetricSpec::tk(DomainSpec::type_i(2, 3).unwrap(), 1.0, 2).unwrap(),
            MetricSpec::bergman(DomainSpec::type_iv(3).unwrap()),
        ] {
            let c = curvature_bounds(&m).unwrap();
            let r = verify_sandwich(&m, &c, 200, 5).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn disc_sandwich_is_tight() {
        let m = MetricSpec::bergman(DomainSpec::type_i(1, 1).unwrap());
        let c = curvature_bounds(&m).unwrap();
        assert!((c.k1 - 2.0).abs() < 1e-12 && (c.k2 - 2.0).abs() < 1e-12);
        let r = verify_sandwich(&m, &c, 50, 1).unwrap();
        assert!(r.lower_margin.abs() < 1e-9 && r.upper_margin.abs() < 1e-9);
    }
}
