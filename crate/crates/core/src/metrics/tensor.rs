use serde::Serialize;

use super::{iv_quadratics, Frame, MetricSpec};
use crate::domains::{iv_invariants, DomainSpec};
use crate::error::{domain, Result};
use crate::norms::{xi_from_power_sums, GFamily, NormSpec, PhiFamily};
use crate::numkernel::{hermitian_eigs, ComplexMatrix, C64, ZERO};

/// `G_{ij̄} = ∂²F²/∂v_i∂v̄_j` over the independent tangent coordinates.
#[derive(Debug, Clone, Serialize)]
pub struct FundamentalTensor {
    pub matrix: ComplexMatrix,
    /// True when the V-derivatives come from closed forms (the function `g`
    /// itself may still be differentiated numerically).
    pub analytic: bool,
}

impl FundamentalTensor {
    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(hermitian_eigs(&self.matrix.hermitian_part())?.min())
    }

    /// `Σ G_{ij̄} v_i v̄_j` for packed coordinates `v`.
    pub fn contract(&self, v: &[C64]) -> f64 {
        let n = v.len();
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += self.matrix[(i, j)] * v[i] * v[j].conj();
            }
        }
        acc.re
    }
}

/// `[Σ_ab (B_s)_ab M_ab]_s` over the tangent basis.
pub(crate) fn contract_basis(domain: &DomainSpec, m: &ComplexMatrix) -> Vec<C64> {
    domain
        .basis()
        .iter()
        .map(|b| {
            b.as_slice()
                .iter()
                .zip(m.as_slice())
                .filter(|(x, _)| x.re != 0.0)
                .map(|(x, y)| y * x.re)
                .sum()
        })
        .collect()
}

/// Powers `P⁰..P^{k}` of `P = WW*` and the power sums `S_1..S_k`.
fn powers(w: &ComplexMatrix, k: usize) -> (Vec<ComplexMatrix>, Vec<f64>) {
    let p = w.gram();
    let mut pw = vec![ComplexMatrix::identity(p.rows())];
    for _ in 0..k {
        let next = pw.last().unwrap() * &p;
        pw.push(next);
    }
    let s = (1..=k).map(|a| pw[a].trace().re.max(0.0)).collect();
    (pw, s)
}

impl MetricSpec {
    /// `∂F²/∂v̄_s` in packed coordinates.
    pub fn gradient_vbar(&self, z: &ComplexMatrix, v: &ComplexMatrix) -> Result<Vec<C64>> {
        self.domain.check_shape(v)?;
        let frame = self.frame(z)?;
        Ok(self.gradient_vbar_in(&frame, v))
    }

    pub(crate) fn gradient_vbar_in(&self, frame: &Frame, v: &ComplexMatrix) -> Vec<C64> {
        match (frame, &self.norm) {
            (Frame::Matrix { lx_inv, ly_inv_adj }, NormSpec::G(g)) => {
                let w = frame.pull(v);
                let k = g.k();
                let (pw, s) = powers(&w, k);
                if s[0] <= 0.0 {
                    return vec![ZERO; self.domain.dim()];
                }
                let grad = g.gradient(&xi_from_power_sums(&s));
                let mut q = ComplexMatrix::zeros(w.rows(), w.cols());
                for a in 1..=k {
                    if grad[a - 1] == 0.0 {
                        continue;
                    }
                    let coef = grad[a - 1] * s[a - 1].powf(1.0 / a as f64 - 1.0);
                    q += &(&pw[a - 1] * &w).scale_real(coef);
                }
                let qv = &(&lx_inv.adjoint() * &q) * &ly_inv_adj.adjoint();
                contract_basis(&self.domain, &qv)
            }
            (Frame::Lie { h, kappa }, NormSpec::Phi(phi)) => {
                iv_gradient(h, *kappa, phi, v).into_iter().map(|x| x.conj()).collect()
            }
            _ => unreachable!("metric constructed with a mismatched norm"),
        }
    }

    /// Fundamental tensor at `(Z;V)`, `V ≠ 0`.
    pub fn fundamental_tensor(&self, z: &ComplexMatrix, v: &ComplexMatrix) -> Result<FundamentalTensor> {
        self.domain.check_shape(v)?;
        if v.max_abs() == 0.0 {
            return Err(domain("fundamental tensor is undefined at V = 0"));
        }
        let frame = self.frame(z)?;
        Ok(FundamentalTensor {
            matrix: self.hessian_in(&frame, v),
            analytic: true,
        })
    }

    pub(crate) fn hessian_in(&self, frame: &Frame, v: &ComplexMatrix) -> ComplexMatrix {
        match (frame, &self.norm) {
            (Frame::Matrix { .. }, NormSpec::G(g)) => {
                let w = frame.pull(v);
                let amb = ambient_hessian(g, &w);
                // columns: pulled basis directions, flattened
                let basis: Vec<ComplexMatrix> = self.domain.basis().iter().map(|b| frame.pull(b)).collect();
                let r = basis.len();
                let mn = w.rows() * w.cols();
                let mut out = ComplexMatrix::zeros(r, r);
                let mut tmp = vec![ZERO; mn];
                for t in 0..r {
                    let ct = basis[t].as_slice();
                    for (ab, slot) in tmp.iter_mut().enumerate() {
                        let mut acc = ZERO;
                        for (cd, y) in ct.iter().enumerate() {
                            acc += amb[(ab, cd)] * y.conj();
                        }
                        *slot = acc;
                    }
                    for s in 0..r {
                        let cs = basis[s].as_slice();
                        out[(s, t)] = cs.iter().zip(&tmp).map(|(x, y)| x * y).sum();
                    }
                }
                out.hermitian_part()
            }
            (Frame::Lie { h, kappa }, NormSpec::Phi(phi)) => iv_hessian(h, *kappa, phi, v),
            _ => unreachable!("metric constructed with a mismatched norm"),
        }
    }
}

/// `∂_{ab}∂̄_{cd} g(h(W))` on the ambient entries of `W`, row-major pairs.
fn ambient_hessian(g: &GFamily, w: &ComplexMatrix) -> ComplexMatrix {
    let (m, n) = w.shape();
    let mn = m * n;
    let k = g.k();
    let (pw, s) = powers(w, k);
    let mut out = ComplexMatrix::zeros(mn, mn);
    if s[0] <= 0.0 {
        return out;
    }
    let xi = xi_from_power_sums(&s);
    let grad = g.gradient(&xi);
    let hess = if g.is_linear() { None } else { Some(g.hessian(&xi)) };
    let wa = w.adjoint();
    // ∂_{ab} h_α, needed for the second-derivative terms of g
    let mut dh: Vec<Vec<C64>> = Vec::with_capacity(k);
    for a in 1..=k {
        let sa = s[a - 1];
        let c1 = sa.powf(1.0 / a as f64 - 1.0);
        let c2 = (1.0 - a as f64) * sa.powf(1.0 / a as f64 - 2.0);
        let qa = &pw[a - 1] * w;
        dh.push(qa.as_slice().iter().map(|x| x.conj() * c1).collect());
        let ga = grad[a - 1];
        if ga == 0.0 {
            continue;
        }
        let pa1 = &pw[a - 1];
        let aj: Vec<ComplexMatrix> = (0..a.saturating_sub(1)).map(|j| &(&wa * &pw[j]) * w).collect();
        for ai in 0..m {
            for b in 0..n {
                let row = ai * n + b;
                let qab = qa[(ai, b)].conj();
                for c in 0..m {
                    for d in 0..n {
                        let col = c * n + d;
                        let mut t = if b == d { pa1[(c, ai)] } else { ZERO };
                        for (j, aj) in aj.iter().enumerate() {
                            t += aj[(b, d)] * pw[a - 2 - j][(c, ai)];
                        }
                        let val = t * c1 + qab * qa[(c, d)] * c2;
                        out[(row, col)] += val * ga;
                    }
                }
            }
        }
    }
    if let Some(h) = hess {
        for a in 0..k {
            for b in 0..k {
                if h[a][b] == 0.0 {
                    continue;
                }
                for row in 0..mn {
                    for col in 0..mn {
                        out[(row, col)] += dh[a][row] * dh[b][col].conj() * h[a][b];
                    }
                }
            }
        }
    }
    out
}

struct IvParts {
    r: f64,
    q: C64,
    p: f64,
    s: f64,
    ri: Vec<C64>,
    si: Vec<C64>,
}

fn iv_parts(h: &ComplexMatrix, kappa: f64, v: &ComplexMatrix) -> Option<IvParts> {
    let n = v.cols();
    let (r, p) = iv_quadratics(h, v);
    if r <= 0.0 {
        return None;
    }
    let (_, q) = iv_invariants(v);
    let ri: Vec<C64> = (0..n)
        .map(|i| (0..n).map(|j| h[(i, j)] * v[(0, j)].conj()).sum())
        .collect();
    let si: Vec<C64> = (0..n)
        .map(|i| v[(0, i)] * q.conj() * (2.0 * kappa / (r * r)) - ri[i] * (2.0 * kappa * p / (r * r * r)))
        .collect();
    let s = (kappa * p / (r * r)).clamp(0.0, 1.0);
    Some(IvParts { r, q, p, s, ri, si })
}

/// `∂F²/∂v_i` for type IV.
fn iv_gradient(h: &ComplexMatrix, kappa: f64, phi: &PhiFamily, v: &ComplexMatrix) -> Vec<C64> {
    let Some(x) = iv_parts(h, kappa, v) else {
        return vec![ZERO; v.cols()];
    };
    let (f, f1) = (phi.value(x.s), phi.d1(x.s));
    x.ri.iter()
        .zip(&x.si)
        .map(|(r_i, s_i)| r_i * f + s_i * (x.r * f1))
        .collect()
}

fn iv_hessian(h: &ComplexMatrix, kappa: f64, phi: &PhiFamily, v: &ComplexMatrix) -> ComplexMatrix {
    let n = v.cols();
    let Some(x) = iv_parts(h, kappa, v) else {
        return ComplexMatrix::zeros(n, n);
    };
    let (f, f1, f2) = (phi.value(x.s), phi.d1(x.s), phi.d2(x.s));
    let (r, q, p) = (x.r, x.q, x.p);
    let (r2, r3, r4) = (r * r, r * r * r, r * r * r * r);
    let out = ComplexMatrix::from_fn(n, n, |i, j| {
        let vi = v[(0, i)];
        let vj = v[(0, j)].conj();
        let rj = x.ri[j].conj();
        let sj = x.si[j].conj();
        let s_ij = vi * vj * (4.0 * kappa / r2)
            - vi * q.conj() * rj * (4.0 * kappa / r3)
            - vj * q * x.ri[i] * (4.0 * kappa / r3)
            - h[(i, j)] * (2.0 * kappa * p / r3)
            + x.ri[i] * rj * (6.0 * kappa * p / r4);
        h[(i, j)] * f + x.ri[i] * sj * f1 + rj * x.si[i] * f1 + x.si[i] * sj * (r * f2) + s_ij * (r * f1)
    });
    out.hermitian_part()
}
