//! Invariant Finsler metrics on the whole domain, their fundamental tensor,
//! Chern-Finsler connection and geodesics.

mod connection;
mod geodesic;
mod tensor;

pub use connection::{
    bergman_connection, horizontal_connection, mixed_derivative, nonlinear_connection, verify_kahler_berwald, z_step,
    ConnectionSample, KahlerBerwaldReport, KahlerBerwaldTolerances, KbWitness,
};
pub use geodesic::{geodesic, GeodesicPath};
pub use tensor::FundamentalTensor;

use crate::domains::{iv_delta, iv_invariants, DomainKind, DomainSpec};
use crate::error::{domain, numeric, structural, Result};
use crate::norms::{eval_g_norm, eval_phi_norm, iv_normalisation, xi_from_power_sums, GFamily, NormSpec, PhiFamily};
use crate::numkernel::{ComplexMatrix, C64};

/// An invariant metric: a domain with the origin norm it is generated by.
/// Type IV norms carry the normalisation `2N`.
#[derive(Debug, Clone)]
pub struct MetricSpec {
    pub domain: DomainSpec,
    pub norm: NormSpec,
}

/// Data at a base point that turns a tangent vector into its image at the
/// origin (types I-III) or into the quadratic invariants (type IV).
#[derive(Debug, Clone)]
pub(crate) enum Frame {
    /// `W = Lx⁻¹ V Ly⁻*` with `LxLx* = I − ZZ*`, `LyLy* = I − Z*Z`.
    Matrix {
        lx_inv: ComplexMatrix,
        ly_inv_adj: ComplexMatrix,
    },
    /// `r̃ = vHv*`, `s̃ = κ|vv'|²/r̃²`.
    Lie { h: ComplexMatrix, kappa: f64 },
}

impl Frame {
    pub(crate) fn pull(&self, v: &ComplexMatrix) -> ComplexMatrix {
        match self {
            Frame::Matrix { lx_inv, ly_inv_adj } => &(lx_inv * v) * ly_inv_adj,
            Frame::Lie { .. } => v.clone(),
        }
    }
}

/// Default scale `c` of the Bergman-type norms.
pub fn default_c(domain: &DomainSpec) -> f64 {
    match domain.kind {
        DomainKind::I => (domain.m + domain.n) as f64,
        DomainKind::II => (domain.m + 1) as f64,
        DomainKind::III => (domain.m - 1) as f64,
        DomainKind::IV => domain.n as f64,
    }
}

impl MetricSpec {
    pub fn new(domain: DomainSpec, norm: NormSpec) -> Result<Self> {
        match (&norm, domain.kind) {
            (NormSpec::Phi(_), DomainKind::IV) => {}
            (NormSpec::G(_), DomainKind::I | DomainKind::II | DomainKind::III) => {}
            _ => return Err(structural(format!("norm family does not apply to {domain}"))),
        }
        Ok(Self { domain, norm })
    }

    /// Bergman metric with the default scale.
    pub fn bergman(domain: DomainSpec) -> Self {
        let norm = match domain.kind {
            DomainKind::IV => NormSpec::Phi(PhiFamily::Constant { c: 1.0 }),
            _ => NormSpec::G(GFamily::Bergman { c: default_c(&domain) }),
        };
        Self { domain, norm }
    }

    /// The `(t, k)` power-trace family with the default scale.
    pub fn tk(domain: DomainSpec, t: f64, k: usize) -> Result<Self> {
        Self::new(domain, NormSpec::G(GFamily::tk(t, k, default_c(&domain))?))
    }

    pub fn phi(domain: DomainSpec, phi: PhiFamily) -> Result<Self> {
        Self::new(domain, NormSpec::Phi(phi))
    }

    /// Bergman metric of the same domain.
    pub fn bergman_companion(&self) -> Self {
        Self::bergman(self.domain)
    }

    pub fn label(&self) -> String {
        let fam = match &self.norm {
            NormSpec::G(GFamily::Bergman { c }) => format!("bergman(c={c})"),
            NormSpec::G(GFamily::Tk { t, k, c }) => format!("tk(t={t},k={k},c={c})"),
            NormSpec::G(GFamily::Linear { weights }) => format!("linear{weights:?}"),
            NormSpec::G(GFamily::Custom { name, .. }) => format!("custom({name})"),
            NormSpec::Phi(PhiFamily::Constant { c }) => format!("constant(c={c})"),
            NormSpec::Phi(PhiFamily::Affine { t }) => format!("affine(t={t})"),
            NormSpec::Phi(PhiFamily::Custom { name, .. }) => format!("custom({name})"),
        };
        format!("{fam} on {}", self.domain)
    }

    /// `F²(0;V)`.
    pub fn origin_sq(&self, v: &ComplexMatrix) -> f64 {
        match &self.norm {
            NormSpec::G(g) => eval_g_norm(g, v),
            NormSpec::Phi(phi) => iv_normalisation(&self.domain) * eval_phi_norm(phi, v),
        }
    }

    pub(crate) fn frame(&self, z: &ComplexMatrix) -> Result<Frame> {
        if !self.domain.contains(z)? {
            return Err(domain(format!("base point outside {}", self.domain)));
        }
        match self.domain.kind {
            DomainKind::IV => {
                let n = self.domain.n;
                let delta = iv_delta(z);
                let (r, q) = iv_invariants(z);
                let scale = iv_normalisation(&self.domain) / (delta * delta);
                let h = ComplexMatrix::from_fn(n, n, |i, j| {
                    let (zi, zj) = (z[(0, i)], z[(0, j)]);
                    let mut x = -q.conj() * zi * zj * 2.0 - zi * zj.conj() * (2.0 * (1.0 - 2.0 * r))
                        + zi.conj() * zj * 2.0
                        - q * zi.conj() * zj.conj() * 2.0;
                    if i == j {
                        x += delta;
                    }
                    x * scale
                });
                let nn = n as f64;
                Ok(Frame::Lie {
                    h: h.hermitian_part(),
                    kappa: 4.0 * nn * nn / (delta * delta),
                })
            }
            _ => {
                let (m, n) = self.domain.shape();
                let left = &ComplexMatrix::identity(m) - &z.gram();
                let right = &ComplexMatrix::identity(n) - &(&z.adjoint() * z);
                let lx = left
                    .hermitian_part()
                    .cholesky(0.0)
                    .map_err(|_| numeric("I − ZZ* lost positive definiteness"))?;
                let ly = right
                    .hermitian_part()
                    .cholesky(0.0)
                    .map_err(|_| numeric("I − Z*Z lost positive definiteness"))?;
                let lx_inv = lx.solve_lower(&ComplexMatrix::identity(m));
                let ly_inv = ly.solve_lower(&ComplexMatrix::identity(n));
                Ok(Frame::Matrix {
                    lx_inv,
                    ly_inv_adj: ly_inv.adjoint(),
                })
            }
        }
    }

    /// `F²(Z;V)` given a precomputed frame.
    pub(crate) fn eval_sq_in(&self, frame: &Frame, v: &ComplexMatrix) -> f64 {
        match (frame, &self.norm) {
            (Frame::Matrix { .. }, NormSpec::G(g)) => eval_g_norm(g, &frame.pull(v)),
            (Frame::Lie { h, kappa }, NormSpec::Phi(phi)) => {
                let (rt, p) = iv_quadratics(h, v);
                if rt <= 0.0 {
                    return 0.0;
                }
                let s = (kappa * p / (rt * rt)).clamp(0.0, 1.0);
                rt * phi.value(s)
            }
            _ => unreachable!("metric constructed with a mismatched norm"),
        }
    }

    /// `F²(Z;V)`.
    pub fn eval_sq(&self, z: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
        self.domain.check_shape(v)?;
        let frame = self.frame(z)?;
        Ok(self.eval_sq_in(&frame, v))
    }

    /// `F(Z;V)`.
    pub fn eval(&self, z: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
        Ok(self.eval_sq(z, v)?.sqrt())
    }

    /// Power-trace coordinates `h̃_α(Z;V)` for types I-III.
    pub fn xi(&self, z: &ComplexMatrix, v: &ComplexMatrix) -> Result<Vec<f64>> {
        match &self.norm {
            NormSpec::G(g) => {
                let w = self.frame(z)?.pull(v);
                Ok(xi_from_power_sums(&crate::norms::power_sums(&w, g.k())))
            }
            NormSpec::Phi(_) => Err(structural("power-trace coordinates need a type I-III domain")),
        }
    }
}

/// `(vHv*, |vv'|²)`.
pub(crate) fn iv_quadratics(h: &ComplexMatrix, v: &ComplexMatrix) -> (f64, f64) {
    let n = v.cols();
    let mut r = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            r += v[(0, i)] * h[(i, j)] * v[(0, j)].conj();
        }
    }
    let (_, q) = iv_invariants(v);
    (r.re, q.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_agrees_with_norm() {
        let d = DomainSpec::type_i(2, 3).unwrap();
        let m = MetricSpec::tk(d, 1.0, 2).unwrap();
        let v = d.sample_tangent(1);
        let a = m.eval_sq(&d.zero(), &v).unwrap();
        assert!((a - m.origin_sq(&v)).abs() < 1e-13 * a);
        let iv = DomainSpec::type_iv(4).unwrap();
        let b = MetricSpec::bergman(iv);
        let v = iv.sample_tangent(2);
        let x = b.eval_sq(&iv.zero(), &v).unwrap();
        assert!((x - 8.0 * v.frobenius_norm().powi(2)).abs() < 1e-12 * x);
    }

    #[test]
    fn disc_bergman_closed_form() {
        let d = DomainSpec::type_i(1, 1).unwrap();
        let m = MetricSpec::bergman(d);
        let z = C64::new(0.3, 0.5);
        let v = C64::new(-0.7, 0.2);
        let got = m
            .eval_sq(
                &ComplexMatrix::from_vec(1, 1, vec![z]),
                &ComplexMatrix::from_vec(1, 1, vec![v]),
            )
            .unwrap();
        let expect = 2.0 * v.norm_sqr() / (1.0 - z.norm_sqr()).powi(2);
        assert!((got - expect).abs() < 1e-13 * expect);
    }

    #[test]
    fn homogeneity_and_zero() {
        let d = DomainSpec::type_iii(4).unwrap();
        let m = MetricSpec::tk(d, 0.5, 3).unwrap();
        let z = d.sample_point(4);
        let v = d.sample_tangent(5);
        let lam = C64::new(-1.3, 0.4);
        let a = m.eval(&z, &v.scale(lam)).unwrap();
        let b = lam.norm() * m.eval(&z, &v).unwrap();
        assert!((a - b).abs() < 1e-12 * b);
        assert_eq!(m.eval(&z, &d.zero()).unwrap(), 0.0);
    }

    #[test]
    fn rejects_points_outside() {
        let d = DomainSpec::type_i(2, 2).unwrap();
        let m = MetricSpec::bergman(d);
        let z = ComplexMatrix::identity(2);
        assert!(matches!(
            m.eval(&z, &d.sample_tangent(1)),
            Err(crate::FinslerError::Domain(_))
        ));
        assert!(MetricSpec::new(d, NormSpec::Phi(PhiFamily::Constant { c: 1.0 })).is_err());
    }
}
