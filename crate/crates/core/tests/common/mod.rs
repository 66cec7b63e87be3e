//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use finsler_core::domains::{iv_invariants, DomainSpec};
use finsler_core::numkernel::hermitian_eigs;
use finsler_core::{ComplexMatrix, MetricSpec, PhiFamily, C64};

/// Gauge by bisection on the ray `t ↦ t·v`, using only membership.
pub fn gauge_by_bisection(d: &DomainSpec, v: &ComplexMatrix) -> f64 {
    let scale = v.frobenius_norm();
    if scale == 0.0 {
        return 0.0;
    }
    let u = v.scale_real(1.0 / scale);
    let (mut lo, mut hi) = (0.0, 1.0);
    while d.contains(&u.scale_real(hi)).unwrap() {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if d.contains(&u.scale_real(mid)).unwrap() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    scale / (0.5 * (lo + hi))
}

/// Eigenvalues of `VV*` from the Hermitian solver.
pub fn gram_eigenvalues(v: &ComplexMatrix) -> Vec<f64> {
    hermitian_eigs(&v.gram().hermitian_part()).unwrap().values
}

/// `e_1..e_k` of `λ` by expanding `Π(1 + λ_i x)`.
pub fn elementary_by_expansion(lambda: &[f64], k: usize) -> Vec<f64> {
    let mut coef = vec![1.0];
    for &l in lambda {
        let mut next = vec![0.0; coef.len() + 1];
        for (i, c) in coef.iter().enumerate() {
            next[i] += c;
            next[i + 1] += c * l;
        }
        coef = next;
    }
    (1..=k).map(|i| coef.get(i).copied().unwrap_or(0.0)).collect()
}

/// Which `Δ` to feed into the type IV formula.
#[derive(Clone, Copy)]
pub enum Delta {
    Squared,
    Linear,
}

/// `F²` of a type IV metric written out entrywise, with a choice of `Δ`.
pub fn iv_metric_sq(phi: &PhiFamily, z: &ComplexMatrix, v: &ComplexMatrix, delta: Delta) -> f64 {
    let n = z.cols();
    let (r, q) = iv_invariants(z);
    let dl = match delta {
        Delta::Squared => 1.0 + q.norm_sqr() - 2.0 * r,
        Delta::Linear => 1.0 + q.norm() - 2.0 * r,
    };
    let nn = n as f64;
    let mut rt = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let (zi, zj) = (z[(0, i)], z[(0, j)]);
            let mut h = -q.conj() * zi * zj * 2.0 - zi * zj.conj() * (2.0 * (1.0 - 2.0 * r)) + zi.conj() * zj * 2.0
                - q * zi.conj() * zj.conj() * 2.0;
            if i == j {
                h += dl;
            }
            rt += v[(0, i)] * h * v[(0, j)].conj() * (2.0 * nn / (dl * dl));
        }
    }
    let rt = rt.re;
    let (_, vq) = iv_invariants(v);
    let s = (4.0 * nn * nn / (dl * dl)) * vq.norm_sqr() / (rt * rt);
    rt * phi.value(s.min(1.0))
}

/// `N·∂_v∂_v̄ (−log Δ)` along `v`: the type IV Bergman quadratic form from
/// the kernel, by second differences.
pub fn iv_bergman_from_kernel(z: &ComplexMatrix, v: &ComplexMatrix) -> f64 {
    let n = z.cols() as f64;
    let f = |w: C64| {
        let p = z + &v.scale(w);
        let (r, q) = iv_invariants(&p);
        -(1.0 + q.norm_sqr() - 2.0 * r).ln()
    };
    let h = 1e-4;
    let c = f(C64::new(0.0, 0.0));
    let lap =
        (f(C64::new(h, 0.0)) + f(C64::new(-h, 0.0)) + f(C64::new(0.0, h)) + f(C64::new(0.0, -h)) - 4.0 * c) / (h * h);
    // ∂∂̄ = Δ/4; at the origin −log Δ ≈ 2zz*, giving 2N·vv*
    n * lap / 4.0
}

/// RK4 for the type I Bergman geodesic `σ̈ = −2σ̇(I − σ*σ)⁻¹σ*σ̇`.
pub fn type_i_geodesic(z0: &ComplexMatrix, v0: &ComplexMatrix, t_end: f64, steps: usize) -> Vec<ComplexMatrix> {
    let n = z0.cols();
    let acc = |s: &ComplexMatrix, ds: &ComplexMatrix| -> ComplexMatrix {
        let gap = &ComplexMatrix::identity(n) - &(&s.adjoint() * s);
        let x = gap.solve(&(&s.adjoint() * ds)).unwrap();
        (ds * &x).scale_real(-2.0)
    };
    let dt = t_end / steps as f64;
    let (mut s, mut ds) = (z0.clone(), v0.clone());
    let mut out = vec![s.clone()];
    for _ in 0..steps {
        let k1 = (ds.clone(), acc(&s, &ds));
        let s2 = &s + &k1.0.scale_real(dt / 2.0);
        let d2 = &ds + &k1.1.scale_real(dt / 2.0);
        let k2 = (d2.clone(), acc(&s2, &d2));
        let s3 = &s + &k2.0.scale_real(dt / 2.0);
        let d3 = &ds + &k2.1.scale_real(dt / 2.0);
        let k3 = (d3.clone(), acc(&s3, &d3));
        let s4 = &s + &k3.0.scale_real(dt);
        let d4 = &ds + &k3.1.scale_real(dt);
        let k4 = (d4.clone(), acc(&s4, &d4));
        let comb = |a: &ComplexMatrix, b: &ComplexMatrix, c: &ComplexMatrix, d: &ComplexMatrix| {
            (&(&(a + &b.scale_real(2.0)) + &c.scale_real(2.0)) + d).scale_real(dt / 6.0)
        };
        s = &s + &comb(&k1.0, &k2.0, &k3.0, &k4.0);
        ds = &ds + &comb(&k1.1, &k2.1, &k3.1, &k4.1);
        out.push(s.clone());
    }
    out
}

/// `G_{ij̄}` by second differences of `F²` over realified coordinates.
pub fn tensor_by_differences(m: &MetricSpec, z: &ComplexMatrix, v: &ComplexMatrix, h: f64) -> ComplexMatrix {
    let basis = m.domain.basis();
    let r = basis.len();
    let f = |a: usize, x: C64, b: usize, y: C64| {
        let w = &(v + &basis[a].scale(x)) + &basis[b].scale(y);
        m.eval_sq(z, &w).unwrap()
    };
    let one = C64::new(h, 0.0);
    let ih = C64::new(0.0, h);
    ComplexMatrix::from_fn(r, r, |i, j| {
        // ∂_i ∂̄_j = ¼(∂x_i − i∂y_i)(∂x_j + i∂y_j)
        let d = |p: C64, q: C64| (f(i, p, j, q) - f(i, p, j, -q) - f(i, -p, j, q) + f(i, -p, j, -q)) / (4.0 * h * h);
        let xx = d(one, one);
        let yy = d(ih, ih);
        let xy = d(one, ih);
        let yx = d(ih, one);
        C64::new(xx + yy, xy - yx) * 0.25
    })
}

/// The shipped metrics of one domain.
pub fn shipped_metrics(d: DomainSpec) -> Vec<MetricSpec> {
    match d.kind {
        finsler_core::DomainKind::IV => vec![
            MetricSpec::bergman(d),
            MetricSpec::phi(d, PhiFamily::affine(0.5).unwrap()).unwrap(),
        ],
        _ => vec![MetricSpec::bergman(d), MetricSpec::tk(d, 1.0, 2).unwrap()],
    }
}
