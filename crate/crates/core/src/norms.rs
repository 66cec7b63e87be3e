//! Complex Minkowski norms at the origin that are invariant under the
//! isotropy group: `g(h₁,…,h_k)` for types I-III, `rφ(s)` for type IV.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::domains::{iv_invariants, DomainKind, DomainSpec};
use crate::error::{structural, Result};
use crate::numkernel::{hermitian_eigs, psd_eigenvalues, ComplexMatrix};
use crate::profile::{default_resolution, optimize_interval, optimize_simplex};

const FD_REL_STEP: f64 = 1e-5;
const GRAD_THRESHOLD: f64 = 1e-10;
const HESS_THRESHOLD: f64 = -1e-10;
const SN_THRESHOLD: f64 = 1e-10;

pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type CurveFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The function `g` of the power-trace coordinates `ξ_α = tr[(VV*)^α]^{1/α}`.
#[derive(Clone)]
pub enum GFamily {
    /// `c·ξ₁`.
    Bergman { c: f64 },
    /// `c/(1+t)·(ξ₁ + t·ξ_k)`.
    Tk { t: f64, k: usize, c: f64 },
    /// `Σ w_α ξ_α`; not a norm unless every weight is positive.
    Linear { weights: Vec<f64> },
    /// User supplied `g` on `k` coordinates; derivatives by finite
    /// differences.
    Custom { k: usize, name: String, f: ScalarFn },
}

impl fmt::Debug for GFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GFamily::Bergman { c } => write!(f, "Bergman {{ c: {c} }}"),
            GFamily::Tk { t, k, c } => write!(f, "Tk {{ t: {t}, k: {k}, c: {c} }}"),
            GFamily::Linear { weights } => write!(f, "Linear {{ weights: {weights:?} }}"),
            GFamily::Custom { k, name, .. } => write!(f, "Custom {{ k: {k}, name: {name:?} }}"),
        }
    }
}

impl GFamily {
    pub fn tk(t: f64, k: usize, c: f64) -> Result<Self> {
        if k < 2 {
            return Err(structural("k ≥ 2 is required"));
        }
        if !t.is_finite() || t < 0.0 {
            return Err(structural("t ∈ [0,∞) is required"));
        }
        if c.is_nan() || c <= 0.0 {
            return Err(structural("c > 0 is required"));
        }
        Ok(GFamily::Tk { t, k, c })
    }

    pub fn bergman(c: f64) -> Result<Self> {
        if c.is_nan() || c <= 0.0 {
            return Err(structural("c > 0 is required"));
        }
        Ok(GFamily::Bergman { c })
    }

    pub fn k(&self) -> usize {
        match self {
            GFamily::Bergman { .. } => 1,
            GFamily::Tk { k, .. } => *k,
            GFamily::Linear { weights } => weights.len(),
            GFamily::Custom { k, .. } => *k,
        }
    }

    /// Coordinates `g` actually depends on (zero-based). Strict monotonicity
    /// is certified only along these.
    pub fn active(&self) -> Vec<usize> {
        match self {
            GFamily::Tk { k, .. } => vec![0, k - 1],
            _ => (0..self.k()).collect(),
        }
    }

    pub fn value(&self, xi: &[f64]) -> f64 {
        match self {
            GFamily::Bergman { c } => c * xi[0],
            GFamily::Tk { t, k, c } => c / (1.0 + t) * (xi[0] + t * xi[k - 1]),
            GFamily::Linear { weights } => weights.iter().zip(xi).map(|(w, x)| w * x).sum(),
            GFamily::Custom { f, .. } => f(xi),
        }
    }

    pub fn gradient(&self, xi: &[f64]) -> Vec<f64> {
        let k = self.k();
        match self {
            GFamily::Bergman { c } => vec![*c],
            GFamily::Tk { t, k, c } => {
                let mut g = vec![0.0; *k];
                g[0] = c / (1.0 + t);
                g[k - 1] += c * t / (1.0 + t);
                g
            }
            GFamily::Linear { weights } => weights.clone(),
            GFamily::Custom { f, .. } => (0..k)
                .map(|a| {
                    let h = fd_step(xi[a]);
                    let mut p = xi.to_vec();
                    let mut m = xi.to_vec();
                    p[a] += h;
                    m[a] -= h;
                    (f(&p) - f(&m)) / (2.0 * h)
                })
                .collect(),
        }
    }

    pub fn hessian(&self, xi: &[f64]) -> Vec<Vec<f64>> {
        let k = self.k();
        match self {
            GFamily::Custom { f, .. } => {
                let mut h = vec![vec![0.0; k]; k];
                for a in 0..k {
                    for b in 0..k {
                        let ha = hess_step(xi[a]);
                        let hb = hess_step(xi[b]);
                        let at = |sa: f64, sb: f64| {
                            let mut p = xi.to_vec();
                            p[a] += sa * ha;
                            p[b] += sb * hb;
                            f(&p)
                        };
                        h[a][b] = (at(1.0, 1.0) - at(1.0, -1.0) - at(-1.0, 1.0) + at(-1.0, -1.0)) / (4.0 * ha * hb);
                    }
                }
                h
            }
            _ => vec![vec![0.0; k]; k],
        }
    }

    /// Rounding floor of the finite-difference Hessian at `xi`; zero for the
    /// built-in families.
    pub fn hessian_noise(&self, xi: &[f64]) -> f64 {
        match self {
            GFamily::Custom { f, .. } => {
                let h = xi.iter().map(|&x| hess_step(x)).fold(f64::INFINITY, f64::min);
                64.0 * f64::EPSILON * f(xi).abs() / (h * h)
            }
            _ => 0.0,
        }
    }

    /// Whether the Hessian of `g` vanishes identically.
    pub fn is_linear(&self) -> bool {
        !matches!(self, GFamily::Custom { .. })
    }
}

fn fd_step(x: f64) -> f64 {
    FD_REL_STEP * x.abs().max(1e-3)
}

fn hess_step(x: f64) -> f64 {
    1e-4 * x.abs().max(1e-3)
}

/// The profile function `φ(s)` on `[0, 1]`.
#[derive(Clone)]
pub enum PhiFamily {
    Constant {
        c: f64,
    },
    /// `(1 + t·s)/(1 + t)`.
    Affine {
        t: f64,
    },
    Custom {
        name: String,
        f: CurveFn,
    },
}

impl fmt::Debug for PhiFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiFamily::Constant { c } => write!(f, "Constant {{ c: {c} }}"),
            PhiFamily::Affine { t } => write!(f, "Affine {{ t: {t} }}"),
            PhiFamily::Custom { name, .. } => write!(f, "Custom {{ name: {name:?} }}"),
        }
    }
}

impl PhiFamily {
    pub fn affine(t: f64) -> Result<Self> {
        if !t.is_finite() || t <= -1.0 {
            return Err(structural("affine φ needs t > -1"));
        }
        Ok(PhiFamily::Affine { t })
    }

    pub fn value(&self, s: f64) -> f64 {
        match self {
            PhiFamily::Constant { c } => *c,
            PhiFamily::Affine { t } => (1.0 + t * s) / (1.0 + t),
            PhiFamily::Custom { f, .. } => f(s),
        }
    }

    pub fn d1(&self, s: f64) -> f64 {
        match self {
            PhiFamily::Constant { .. } => 0.0,
            PhiFamily::Affine { t } => t / (1.0 + t),
            PhiFamily::Custom { f, .. } => {
                let h = FD_REL_STEP;
                (f(s + h) - f(s - h)) / (2.0 * h)
            }
        }
    }

    pub fn d2(&self, s: f64) -> f64 {
        match self {
            PhiFamily::Custom { f, .. } => {
                let h = 1e-4;
                (f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h)
            }
            _ => 0.0,
        }
    }
}

/// Origin norm of a metric: `g` for types I-III or `φ` for type IV.
#[derive(Debug, Clone)]
pub enum NormSpec {
    G(GFamily),
    Phi(PhiFamily),
}

/// Power sums `S_α = tr[(VV*)^α]`, `α = 1..k`.
pub fn power_sums(v: &ComplexMatrix, k: usize) -> Vec<f64> {
    let p = v.gram();
    let mut acc = p.clone();
    let mut out = Vec::with_capacity(k);
    for a in 1..=k {
        if a > 1 {
            acc = &acc * &p;
        }
        out.push(acc.trace().re.max(0.0));
    }
    out
}

/// `h_α = S_α^{1/α}`.
pub fn xi_from_power_sums(s: &[f64]) -> Vec<f64> {
    s.iter()
        .enumerate()
        .map(|(i, &x)| if x > 0.0 { x.powf(1.0 / (i + 1) as f64) } else { 0.0 })
        .collect()
}

/// `S_α = mult·Σ μ_i^α` for a spectrum of `VV*` given by weights `μ`.
pub fn power_sums_from_weights(mu: &[f64], mult: f64, k: usize) -> Vec<f64> {
    (1..=k)
        .map(|a| mult * mu.iter().map(|&x| x.powi(a as i32)).sum::<f64>())
        .collect()
}

/// `f²(V) = g(h₁(V),…,h_k(V))`.
pub fn eval_g_norm(g: &GFamily, v: &ComplexMatrix) -> f64 {
    let xi = xi_from_power_sums(&power_sums(v, g.k()));
    if xi[0] == 0.0 {
        return 0.0;
    }
    g.value(&xi)
}

/// `f²(ξ) = rφ(s)` with `r = ξξ*`, `s = |ξξ'|²/r²`.
pub fn eval_phi_norm(phi: &PhiFamily, xi: &ComplexMatrix) -> f64 {
    let (r, q) = iv_invariants(xi);
    if r == 0.0 {
        return 0.0;
    }
    let s = (q.norm_sqr() / (r * r)).min(1.0);
    r * phi.value(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub point: Vec<f64>,
    pub condition: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub pass: bool,
    /// Smallest `value − threshold` over the grid; negative means failure.
    pub worst_margin: f64,
    pub witness: Option<Witness>,
}

impl Certificate {
    fn from_checks(checks: Vec<(f64, Witness)>) -> Self {
        let mut worst: Option<(f64, Witness)> = None;
        for (m, w) in checks {
            if worst.as_ref().is_none_or(|(wm, _)| m < *wm) {
                worst = Some((m, w));
            }
        }
        let (margin, witness) = worst.expect("certification grid must be nonempty");
        let pass = margin > 0.0 || (margin == 0.0 && witness.condition.starts_with("hessian"));
        Certificate {
            pass,
            worst_margin: margin,
            witness: if pass { None } else { Some(witness) },
        }
    }
}

/// Strong pseudoconvexity of `g`: active gradient entries above `1e−10` and
/// Hessian eigenvalues at least `−1e−10` at every grid point.
pub fn certify_scc(g: &GFamily, grid: &[Vec<f64>]) -> Result<Certificate> {
    if grid.is_empty() {
        return Err(structural("certification grid is empty"));
    }
    let active = g.active();
    let mut checks = Vec::new();
    for xi in grid {
        if xi.len() != g.k() {
            return Err(structural("grid point has the wrong length"));
        }
        let grad = g.gradient(xi);
        for &a in &active {
            checks.push((
                grad[a] - GRAD_THRESHOLD,
                Witness {
                    point: xi.clone(),
                    condition: format!("gradient[{}] > 0", a + 1),
                    value: grad[a],
                },
            ));
        }
        if !g.is_linear() {
            let h = g.hessian(xi);
            let k = g.k();
            let m = ComplexMatrix::from_fn(k, k, |i, j| crate::numkernel::C64::new(0.5 * (h[i][j] + h[j][i]), 0.0));
            let min = hermitian_eigs(&m)?.min();
            checks.push((
                min - HESS_THRESHOLD + g.hessian_noise(xi),
                Witness {
                    point: xi.clone(),
                    condition: "hessian min eigenvalue ≥ 0".into(),
                    value: min,
                },
            ));
        }
    }
    Ok(Certificate::from_checks(checks))
}

/// Seeded points of the open positive orthant for [`certify_scc`], mixing
/// power-trace coordinates of random spectra with uniform draws.
pub fn default_scc_grid(k: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            if i % 2 == 0 {
                let mu: Vec<f64> = (0..k.max(2)).map(|_| rng.random_range(1e-3..1.0)).collect();
                xi_from_power_sums(&power_sums_from_weights(&mu, 1.0, k))
            } else {
                (0..k).map(|_| rng.random_range(1e-3..1.0)).collect()
            }
        })
        .collect()
}

/// The two strict inequalities on `φ` for type IV, plus positivity.
pub fn certify_sn(phi: &PhiFamily, s_grid: &[f64]) -> Result<Certificate> {
    if s_grid.is_empty() {
        return Err(structural("certification grid is empty"));
    }
    let mut checks = Vec::new();
    for &s in s_grid {
        let (f, f1, f2) = (phi.value(s), phi.d1(s), phi.d2(s));
        let c0 = f;
        let c1 = f - 2.0 * s * f1;
        let c2 = f * (f + 2.0 * (2.0 - 3.0 * s) * f1) + 4.0 * s * (1.0 - s) * (f * f2 - f1 * f1);
        for (value, name) in [
            (c0, "φ > 0"),
            (c1, "φ − 2sφ' > 0"),
            (c2, "φ[φ + 2(2−3s)φ'] + 4s(1−s)[φφ'' − φ'²] > 0"),
        ] {
            checks.push((
                value - SN_THRESHOLD,
                Witness {
                    point: vec![s],
                    condition: name.into(),
                    value,
                },
            ));
        }
    }
    Ok(Certificate::from_checks(checks))
}

/// `points + 1` equally spaced nodes of `[0, 1]`.
pub fn default_s_grid(points: usize) -> Vec<f64> {
    (0..=points).map(|i| i as f64 / points as f64).collect()
}

/// Comparison constants `c₁ tr(VV*) ≤ f²(V) ≤ c₂ tr(VV*)` with their
/// extremizing profiles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormBounds {
    pub c1: f64,
    pub c2: f64,
    pub argmin_profile: Vec<f64>,
    pub argmax_profile: Vec<f64>,
}

/// Multiplicity of each singular value in the spectrum of `VV*` for a
/// canonical profile vector.
pub(crate) fn spectral_multiplicity(domain: &DomainSpec) -> f64 {
    if domain.kind == DomainKind::III {
        2.0
    } else {
        1.0
    }
}

/// Converts simplex weights `μ` into singular values `√μ`.
pub fn weights_to_profile(mu: &[f64]) -> Vec<f64> {
    mu.iter().map(|&x| x.max(0.0).sqrt()).collect()
}

/// Type IV normalisation so that the Bergman metric reads `2N·vv*` at 0.
pub fn iv_normalisation(domain: &DomainSpec) -> f64 {
    2.0 * domain.n as f64
}

pub fn minkowski_bounds(norm: &NormSpec, domain: &DomainSpec) -> Result<NormBounds> {
    match (norm, domain.kind) {
        (NormSpec::Phi(phi), DomainKind::IV) => {
            let scale = iv_normalisation(domain);
            let e = optimize_interval(10_000, &|s| scale * phi.value(s));
            Ok(NormBounds {
                c1: e.min.value,
                c2: e.max.value,
                argmin_profile: e.min.point,
                argmax_profile: e.max.point,
            })
        }
        (NormSpec::G(g), DomainKind::I | DomainKind::II | DomainKind::III) => {
            let dim = domain.profile_len();
            let mult = spectral_multiplicity(domain);
            let k = g.k();
            let psi = |mu: &[f64]| {
                let s = power_sums_from_weights(mu, mult, k);
                g.value(&xi_from_power_sums(&s)) / s[0]
            };
            let e = optimize_simplex(dim, default_resolution(dim), &psi);
            Ok(NormBounds {
                c1: e.min.value,
                c2: e.max.value,
                argmin_profile: weights_to_profile(&e.min.point),
                argmax_profile: weights_to_profile(&e.max.point),
            })
        }
        _ => Err(structural(format!("norm family does not apply to {domain}"))),
    }
}

/// Squared singular values of `V` as normalised simplex weights.
pub fn weights_of(domain: &DomainSpec, v: &ComplexMatrix) -> Result<Vec<f64>> {
    let mut eig = psd_eigenvalues(&v.gram())?;
    if domain.kind == DomainKind::III {
        // pairs of equal values
        eig = eig.chunks(2).map(|c| c.iter().sum::<f64>() / c.len() as f64).collect();
    }
    eig.truncate(domain.profile_len());
    let total: f64 = eig.iter().sum();
    Ok(eig.iter().map(|x| x / total).collect())
}
