//! Holomorphic sectional and bisectional curvature of invariant metrics,
//! computed at the origin and transported by automorphisms.

use rayon::prelude::*;
use serde::Serialize;

use crate::automorphisms::normalizing_automorphism;
use crate::diff::radial_second_coefficient;
use crate::domains::{derive_seed, DomainKind, DomainSpec};
use crate::error::{domain, numeric, structural, Result};
use crate::metrics::MetricSpec;
use crate::norms::{
    certify_scc, certify_sn, default_s_grid, default_scc_grid, power_sums, power_sums_from_weights,
    spectral_multiplicity, weights_to_profile, xi_from_power_sums, GFamily, NormSpec,
};
use crate::numkernel::{ComplexMatrix, C64};
use crate::profile::{default_resolution, optimize_interval, optimize_simplex};

/// Profiles whose smallest to largest singular value ratio falls below this
/// are flagged as degenerate extremizers.
const DEGENERATE_RATIO: f64 = 1e-6;
const RADIAL_LEVELS: usize = 6;
const BISECTIONAL_DRAWS: usize = 10_000;

#[derive(Debug, Clone, Serialize)]
pub struct CurvatureReport {
    pub metric: String,
    #[serde(rename = "K1")]
    pub k1: f64,
    #[serde(rename = "K2")]
    pub k2: f64,
    pub lu: f64,
    /// Singular values (types I-III) or `[s]` (type IV) where `K = −K₁`.
    pub argmin_profile: Vec<f64>,
    /// Same for `K = −K₂`.
    pub argmax_profile: Vec<f64>,
    /// Estimated `C` in `−C ≤ B ≤ 0`.
    pub bisectional_bound: f64,
    pub argmin_degenerate: bool,
    pub argmax_degenerate: bool,
}

fn nonzero(v: &ComplexMatrix) -> Result<()> {
    if v.max_abs() == 0.0 {
        Err(domain("curvature is undefined at V = 0"))
    } else {
        Ok(())
    }
}

/// `−(4/g²) Σ_α g_α S_α^{1/α−1} S_{α+1}` from the power sums `S_1..S_{k+1}`.
fn hsc_from_power_sums(g: &GFamily, s: &[f64]) -> f64 {
    let k = g.k();
    let xi = xi_from_power_sums(&s[..k]);
    let grad = g.gradient(&xi);
    let f2 = g.value(&xi);
    let sum: f64 = (1..=k)
        .map(|a| grad[a - 1] * s[a - 1].powf(1.0 / a as f64 - 1.0) * s[a])
        .sum();
    -4.0 * sum / (f2 * f2)
}

/// `K_F(0;V)`: closed form for types I-III, radial differences for type IV.
pub fn hsc_origin(metric: &MetricSpec, v: &ComplexMatrix) -> Result<f64> {
    metric.domain.check_shape(v)?;
    nonzero(v)?;
    match &metric.norm {
        NormSpec::G(g) => Ok(hsc_from_power_sums(g, &power_sums(v, g.k() + 1))),
        NormSpec::Phi(_) => hsc_origin_numeric(metric, v),
    }
}

/// `K_F(0;V) = −(2/F⁴) ∂_ζ∂_ζ̄ F²(ζV;V)|₀`, the coefficient taken by
/// Richardson extrapolation along the real ray.
pub fn hsc_origin_numeric(metric: &MetricSpec, v: &ComplexMatrix) -> Result<f64> {
    bisectional_origin_numeric(metric, v, v)
}

/// `K_F(Z;V)` by pulling `(Z;V)` back to the origin.
pub fn hsc(metric: &MetricSpec, z: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    let phi = normalizing_automorphism(&metric.domain, z)?;
    hsc_origin(metric, &phi.differential(z, v)?)
}

/// `B_F(0;V,W)`.
pub fn bisectional_origin(metric: &MetricSpec, v: &ComplexMatrix, w: &ComplexMatrix) -> Result<f64> {
    let d = &metric.domain;
    d.check_shape(v)?;
    d.check_shape(w)?;
    nonzero(v)?;
    nonzero(w)?;
    let NormSpec::G(g) = &metric.norm else {
        return bisectional_origin_numeric(metric, v, w);
    };
    let k = g.k();
    let s = power_sums(v, k);
    let xi = xi_from_power_sums(&s);
    let grad = g.gradient(&xi);
    let fv = g.value(&xi);
    let fw = metric.origin_sq(w);
    let p = v.gram();
    let pt = &v.adjoint() * v;
    let (ww, wtw) = (w.gram(), &w.adjoint() * w);
    let (mut pa, mut pta) = (p.clone(), pt.clone());
    let mut sum = 0.0;
    for a in 1..=k {
        if a > 1 {
            pa = &pa * &p;
            pta = &pta * &pt;
        }
        let cross = (&ww * &pa).trace().re + (&wtw * &pta).trace().re;
        sum += grad[a - 1] * s[a - 1].powf(1.0 / a as f64 - 1.0) * cross;
    }
    Ok(-2.0 * sum / (fv * fw))
}

/// `B_F(0;V,W) = −2/(F²(V)F²(W)) ∂_ζ∂_ζ̄ F²(ζW;V)|₀`.
pub fn bisectional_origin_numeric(metric: &MetricSpec, v: &ComplexMatrix, w: &ComplexMatrix) -> Result<f64> {
    let d = &metric.domain;
    nonzero(v)?;
    nonzero(w)?;
    let rho0 = 0.1 / d.gauge(w);
    let c = radial_second_coefficient(|rho| metric.eval_sq(&w.scale_real(rho), v), rho0, RADIAL_LEVELS)?;
    Ok(-2.0 * c / (metric.origin_sq(v) * metric.origin_sq(w)))
}

/// A tangent vector at the origin with the given singular values (types
/// I-III; type III uses 2×2 blocks) or the given `s` (type IV, `[s]`).
pub fn profile_vector(spec: &DomainSpec, profile: &[f64]) -> Result<ComplexMatrix> {
    let (m, n) = spec.shape();
    match spec.kind {
        DomainKind::I | DomainKind::II => {
            if profile.len() > m.min(n) {
                return Err(structural("profile longer than the rank"));
            }
            Ok(ComplexMatrix::diag_real(m, n, profile))
        }
        DomainKind::III => {
            if profile.len() > m / 2 {
                return Err(structural("profile longer than the rank"));
            }
            let mut v = ComplexMatrix::zeros(m, m);
            for (i, &x) in profile.iter().enumerate() {
                v[(2 * i, 2 * i + 1)] = C64::new(x, 0.0);
                v[(2 * i + 1, 2 * i)] = C64::new(-x, 0.0);
            }
            Ok(v)
        }
        DomainKind::IV => {
            let [s] = profile else {
                return Err(structural("type IV profiles are a single s"));
            };
            if !(0.0..=1.0).contains(s) {
                return Err(domain("s must lie in [0, 1]"));
            }
            let q = s.sqrt();
            let mut v = ComplexMatrix::zeros(1, n);
            v[(0, 0)] = C64::new(((1.0 + q) / 2.0).sqrt(), 0.0);
            v[(0, 1)] = C64::new(0.0, ((1.0 - q) / 2.0).sqrt());
            Ok(v)
        }
    }
}

/// Checks strong pseudoconvexity of the origin norm on a default grid.
pub fn certify_metric(metric: &MetricSpec) -> Result<()> {
    let cert = match &metric.norm {
        NormSpec::G(g) => certify_scc(g, &default_scc_grid(g.k(), 500, 17))?,
        NormSpec::Phi(phi) => certify_sn(phi, &default_s_grid(1000))?,
    };
    match cert.witness {
        None => Ok(()),
        Some(w) => Err(structural(format!(
            "{} is not strongly pseudoconvex: {} fails at {:?} (value {:.3e})",
            metric.label(),
            w.condition,
            w.point,
            w.value
        ))),
    }
}

fn degenerate(profile: &[f64], kind: DomainKind) -> bool {
    if kind == DomainKind::IV {
        return false;
    }
    let max = profile.iter().cloned().fold(0.0, f64::max);
    let min = profile.iter().cloned().fold(f64::INFINITY, f64::min);
    // ratio of the squared singular values
    (min * min) < DEGENERATE_RATIO * max * max
}

/// Extremes of the sectional curvature over the projectivised fibre, the
/// Lu constant and an estimate of the bisectional lower bound.
pub fn curvature_bounds(metric: &MetricSpec) -> Result<CurvatureReport> {
    certify_metric(metric)?;
    let d = &metric.domain;
    let (min, max) = match &metric.norm {
        NormSpec::G(g) => {
            let dim = d.profile_len();
            let mult = spectral_multiplicity(d);
            let k = g.k();
            let f = |mu: &[f64]| hsc_from_power_sums(g, &power_sums_from_weights(mu, mult, k + 1));
            let e = optimize_simplex(dim, default_resolution(dim), &f);
            let (mut lo, mut hi) = (e.min, e.max);
            lo.point = weights_to_profile(&lo.point);
            hi.point = weights_to_profile(&hi.point);
            (lo, hi)
        }
        NormSpec::Phi(_) => {
            let f = |s: f64| {
                profile_vector(d, &[s])
                    .and_then(|v| hsc_origin_numeric(metric, &v))
                    .unwrap_or(f64::NAN)
            };
            let e = optimize_interval(10_000, &f);
            (e.min, e.max)
        }
    };
    if !(min.value.is_finite() && max.value.is_finite()) {
        return Err(numeric(format!(
            "curvature optimisation produced non-finite values (min {}, max {})",
            min.value, max.value
        )));
    }
    let (k1, k2) = (-min.value, -max.value);
    if k2 <= 0.0 {
        return Err(numeric(format!("sectional curvature reaches {:.3e} ≥ 0", max.value)));
    }
    let bmin = bisectional_samples(metric, BISECTIONAL_DRAWS, 0x5eed)?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let mut report = CurvatureReport {
        metric: metric.label(),
        k1,
        k2,
        lu: 0.0,
        argmin_degenerate: degenerate(&min.point, d.kind),
        argmax_degenerate: degenerate(&max.point, d.kind),
        argmin_profile: min.point,
        argmax_profile: max.point,
        bisectional_bound: k1.max(-bmin),
    };
    report.lu = lu_constant(&report);
    Ok(report)
}

/// `√(K₁/K₂)`, snapped to 1 when the two agree to 1e−8.
pub fn lu_constant(report: &CurvatureReport) -> f64 {
    if (report.k1 - report.k2).abs() <= 1e-8 * report.k1 {
        1.0
    } else {
        (report.k1 / report.k2).sqrt()
    }
}

/// Seeded tangent vectors at the origin spread over the projectivised
/// fibre: Gaussian draws sharpened by `(VV*)^p V` for types I-III, mixed
/// with real directions (`s = 1`) for type IV.
pub fn fibre_vector(domain: &DomainSpec, seed: u64) -> ComplexMatrix {
    let v = domain.sample_tangent(seed);
    let p = (seed % 4) as u32;
    match domain.kind {
        DomainKind::IV => match seed % 3 {
            0 => v.real_part(),
            _ => v,
        },
        _ if p == 0 => v,
        _ => {
            let w = &v.gram().powi(p) * &v;
            w.scale_real(1.0 / w.max_abs())
        }
    }
}

/// `K_F(0;V)` at `count` fibre vectors.
pub fn sectional_samples(metric: &MetricSpec, count: usize, seed: u64) -> Result<Vec<f64>> {
    (0..count)
        .into_par_iter()
        .map(|i| hsc_origin(metric, &fibre_vector(&metric.domain, derive_seed(seed, 11, i as u64))))
        .collect()
}

/// `B_F(0;V,W)` at `count` random pairs; the first pairs are coordinate
/// directions.
pub fn bisectional_samples(metric: &MetricSpec, count: usize, seed: u64) -> Result<Vec<f64>> {
    let d = &metric.domain;
    let basis = d.basis();
    let r = basis.len();
    (0..count)
        .into_par_iter()
        .map(|i| {
            if i < r * r {
                return bisectional_origin(metric, &basis[i / r], &basis[i % r]);
            }
            let v = fibre_vector(d, derive_seed(seed, 12, i as u64));
            let w = fibre_vector(d, derive_seed(seed, 13, i as u64));
            bisectional_origin(metric, &v, &w)
        })
        .collect()
}
