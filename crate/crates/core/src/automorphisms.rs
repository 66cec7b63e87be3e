//! Holomorphic maps between classical domains: normalizing automorphisms,
//! isotropy elements, their inverses and composites, plus the simple map
//! families used by the Schwarz harness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::diff::contour_derivative;
use crate::domains::{derive_seed, iv_invariants, DomainKind, DomainSpec};
use crate::error::{domain, numeric, structural, Result};
use crate::numkernel::{hermitian_eigs, orthonormalize_columns, pd_sqrt, ComplexMatrix, C64, I, ONE};

const CONTOUR_POINTS: usize = 16;
const CONTOUR_FRACTION: f64 = 0.1;
const NEWTON_MAX_ITER: usize = 50;
/// `(I − Z₀Z₀*)` must have its smallest eigenvalue above this.
const MIN_GAP: f64 = 1e-12;

/// Map data. Composition lists are applied right to left.
#[derive(Debug, Clone)]
pub enum MapBody {
    Identity,
    /// `A(Z−Z₀)(I−Z₀*Z)⁻¹D⁻¹`; for types II and III `D = Ā`.
    Mobius {
        z0: ComplexMatrix,
        a: ComplexMatrix,
        d: ComplexMatrix,
        d_inv: ComplexMatrix,
    },
    /// Inverse of [`MapBody::Mobius`]: `(A + WDZ₀*)⁻¹(WD + AZ₀)`.
    MobiusInverse {
        z0: ComplexMatrix,
        a: ComplexMatrix,
        d: ComplexMatrix,
    },
    /// Normalizing automorphism of the Lie ball.
    TypeIv {
        z0: ComplexMatrix,
        x0: ComplexMatrix,
        a: ComplexMatrix,
        d: ComplexMatrix,
    },
    /// Inverse of `forward` by damped Newton iteration.
    NewtonInverse {
        forward: Box<HoloMap>,
        seed: ComplexMatrix,
    },
    /// `Z ↦ LZR` with unitary `L`, `R`.
    Isotropy {
        left: ComplexMatrix,
        right: ComplexMatrix,
    },
    /// `Z ↦ Σ L_j Z R_j`.
    Linear {
        terms: Vec<(ComplexMatrix, ComplexMatrix)>,
    },
    /// `(f + f')/2` or `(f − f')/2`, to land in a type II or III target.
    Symmetrize {
        inner: Box<HoloMap>,
        skew: bool,
    },
    Constant {
        value: ComplexMatrix,
    },
    /// `c₀ + s·L(Z + ZM₁Z + ZM₂ZM₃Z)R`.
    Polynomial {
        c0: ComplexMatrix,
        left: ComplexMatrix,
        right: ComplexMatrix,
        m1: ComplexMatrix,
        m2: ComplexMatrix,
        m3: ComplexMatrix,
        scale: f64,
    },
    Composition(Vec<HoloMap>),
}

#[derive(Debug, Clone)]
pub struct HoloMap {
    pub source: DomainSpec,
    pub target: DomainSpec,
    pub body: MapBody,
}

impl HoloMap {
    pub fn identity(domain: DomainSpec) -> Self {
        Self {
            source: domain,
            target: domain,
            body: MapBody::Identity,
        }
    }

    pub fn constant(source: DomainSpec, target: DomainSpec, value: ComplexMatrix) -> Result<Self> {
        target.check_shape(&value)?;
        Ok(Self {
            source,
            target,
            body: MapBody::Constant { value },
        })
    }

    pub fn linear(source: DomainSpec, target: DomainSpec, terms: Vec<(ComplexMatrix, ComplexMatrix)>) -> Result<Self> {
        for (l, r) in &terms {
            if l.shape() != (target.m, source.m) || r.shape() != (source.n, target.n) {
                return Err(structural("linear map factors have the wrong shapes"));
            }
        }
        Ok(Self {
            source,
            target,
            body: MapBody::Linear { terms },
        })
    }

    /// `outer ∘ inner`, flattening nested composites.
    pub fn compose(outer: HoloMap, inner: HoloMap) -> Result<Self> {
        if inner.target != outer.source {
            return Err(structural(format!(
                "cannot compose: {} does not match {}",
                inner.target, outer.source
            )));
        }
        let (source, target) = (inner.source, outer.target);
        let mut parts = Vec::new();
        for m in [outer, inner] {
            match m.body {
                MapBody::Composition(list) => parts.extend(list),
                MapBody::Identity => {}
                _ => parts.push(m),
            }
        }
        let body = match parts.len() {
            0 => MapBody::Identity,
            1 => parts.pop().unwrap().body,
            _ => MapBody::Composition(parts),
        };
        Ok(Self { source, target, body })
    }

    pub fn apply(&self, z: &ComplexMatrix) -> Result<ComplexMatrix> {
        match &self.body {
            MapBody::Identity => Ok(z.clone()),
            MapBody::Mobius { z0, a, d_inv, .. } => {
                let r = &ComplexMatrix::identity(z.cols()) - &(&z0.adjoint() * z);
                let lhs = &(a * &(z - z0));
                Ok(&r.solve_right(lhs)? * d_inv)
            }
            MapBody::MobiusInverse { z0, a, d } => {
                let wd = z * d;
                let lhs = a + &(&wd * &z0.adjoint());
                lhs.solve(&(&wd + &(a * z0)))
            }
            MapBody::TypeIv { x0, a, d, .. } => {
                let (_, q) = iv_invariants(z);
                let p = ComplexMatrix::row(&[(ONE + q) * 0.5, (ONE - q) / (I * 2.0)]);
                let zx = z * &x0.transpose();
                let pa = &(&p - &zx) * a;
                let den = pa[(0, 0)] + pa[(0, 1)] * I;
                if den.norm() < 1e-300 {
                    return Err(numeric("degenerate denominator in the type IV map"));
                }
                let num = &(z - &(&p * x0)) * d;
                Ok(num.scale(ONE / den))
            }
            MapBody::NewtonInverse { forward, seed } => newton_inverse(forward, seed, z),
            MapBody::Isotropy { left, right } => Ok(&(left * z) * right),
            MapBody::Linear { terms } => {
                let mut out = self.target.zero();
                for (l, r) in terms {
                    out += &(&(l * z) * r);
                }
                Ok(out)
            }
            MapBody::Symmetrize { inner, skew } => {
                let w = inner.apply(z)?;
                Ok(symmetrize(&w, *skew))
            }
            MapBody::Constant { value } => Ok(value.clone()),
            MapBody::Polynomial {
                c0,
                left,
                right,
                m1,
                m2,
                m3,
                scale,
            } => {
                let zm1z = &(z * m1) * z;
                let zm2zm3z = &(&(&(z * m2) * z) * m3) * z;
                let inner = &(z + &zm1z) + &zm2zm3z;
                Ok(c0 + &(&(left * &inner) * right).scale_real(*scale))
            }
            MapBody::Composition(list) => {
                let mut cur = z.clone();
                for m in list.iter().rev() {
                    cur = m.apply(&cur)?;
                }
                Ok(cur)
            }
        }
    }

    /// `apply` followed by a membership check in the target.
    pub fn apply_checked(&self, z: &ComplexMatrix) -> Result<ComplexMatrix> {
        let w = self.apply(z)?;
        if !self.target.contains(&w)? {
            return Err(domain(format!("image point left {}", self.target)));
        }
        Ok(w)
    }

    /// Differential `f_*(V)` at `Z`.
    pub fn differential(&self, z: &ComplexMatrix, v: &ComplexMatrix) -> Result<ComplexMatrix> {
        match &self.body {
            MapBody::Identity => Ok(v.clone()),
            MapBody::Mobius { z0, a, d_inv, .. } => {
                let z0a = z0.adjoint();
                let r = &ComplexMatrix::identity(z.cols()) - &(&z0a * z);
                let r_inv = r.inverse()?;
                let t1 = &(a * v) * &r_inv;
                let t2 = &(&(&(&(a * &(z - z0)) * &r_inv) * &z0a) * v) * &r_inv;
                Ok(&(&t1 + &t2) * d_inv)
            }
            MapBody::MobiusInverse { z0, a, d } => {
                let wd = z * d;
                let lhs = a + &(&wd * &z0.adjoint());
                let psi = lhs.solve(&(&wd + &(a * z0)))?;
                let tail = &ComplexMatrix::identity(psi.cols()) - &(&z0.adjoint() * &psi);
                lhs.solve(&(&(v * d) * &tail))
            }
            MapBody::TypeIv { .. } => self.numeric_differential(z, v),
            MapBody::NewtonInverse { forward, seed } => {
                let pre = newton_inverse(forward, seed, z)?;
                let jac = jacobian(forward, &pre)?;
                let col = jac.solve(&vec_column(v))?;
                Ok(ComplexMatrix::from_vec(v.rows(), v.cols(), col.into_vec()))
            }
            MapBody::Isotropy { left, right } => Ok(&(left * v) * right),
            MapBody::Linear { terms } => {
                let mut out = self.target.zero();
                for (l, r) in terms {
                    out += &(&(l * v) * r);
                }
                Ok(out)
            }
            MapBody::Symmetrize { inner, skew } => Ok(symmetrize(&inner.differential(z, v)?, *skew)),
            MapBody::Constant { .. } => Ok(self.target.zero()),
            MapBody::Polynomial {
                left,
                right,
                m1,
                m2,
                m3,
                scale,
                ..
            } => {
                let mut d = v.clone();
                d += &(&(v * m1) * z);
                d += &(&(z * m1) * v);
                let zm2 = z * m2;
                let m3z = m3 * z;
                d += &(&(&(v * m2) * z) * &m3z);
                d += &(&(&zm2 * v) * &m3z);
                d += &(&(&zm2 * z) * &(m3 * v));
                Ok((&(left * &d) * right).scale_real(*scale))
            }
            MapBody::Composition(list) => {
                let mut cz = z.clone();
                let mut cv = v.clone();
                for m in list.iter().rev() {
                    cv = m.differential(&cz, &cv)?;
                    cz = m.apply(&cz)?;
                }
                Ok(cv)
            }
        }
    }

    /// Differential by the Cauchy integral along `ζ ↦ Z + ζV`, on a circle
    /// that stays inside the source domain.
    pub fn numeric_differential(&self, z: &ComplexMatrix, v: &ComplexMatrix) -> Result<ComplexMatrix> {
        let gv = self.source.gauge(v);
        if gv == 0.0 {
            return Ok(self.target.zero());
        }
        let gz = self.source.gauge(z);
        if gz >= 1.0 {
            return Err(domain("base point outside the source domain"));
        }
        let radius = CONTOUR_FRACTION * (1.0 - gz) / gv;
        contour_derivative(|zeta| self.apply(&(z + &v.scale(zeta))), radius, CONTOUR_POINTS)
    }

    pub fn invert(&self) -> Result<HoloMap> {
        let body = match &self.body {
            MapBody::Identity => MapBody::Identity,
            MapBody::Mobius { z0, a, d, .. } => MapBody::MobiusInverse {
                z0: z0.clone(),
                a: a.clone(),
                d: d.clone(),
            },
            MapBody::MobiusInverse { z0, a, d } => MapBody::Mobius {
                z0: z0.clone(),
                a: a.clone(),
                d: d.clone(),
                d_inv: d.inverse()?,
            },
            MapBody::TypeIv { z0, .. } => MapBody::NewtonInverse {
                forward: Box::new(self.clone()),
                seed: z0.clone(),
            },
            MapBody::NewtonInverse { forward, .. } => return Ok((**forward).clone()),
            MapBody::Isotropy { left, right } => MapBody::Isotropy {
                left: left.adjoint(),
                right: right.adjoint(),
            },
            MapBody::Composition(list) => {
                MapBody::Composition(list.iter().rev().map(|m| m.invert()).collect::<Result<Vec<_>>>()?)
            }
            _ => return Err(structural("map is not an automorphism")),
        };
        Ok(HoloMap {
            source: self.target,
            target: self.source,
            body,
        })
    }

    /// Whether every probe point of the source lands inside the target.
    pub fn maps_probes_inside(&self, probes: &[ComplexMatrix]) -> bool {
        probes.iter().all(|z| match self.apply(z) {
            Ok(w) => self.target.contains(&w).unwrap_or(false),
            Err(_) => false,
        })
    }
}

fn symmetrize(w: &ComplexMatrix, skew: bool) -> ComplexMatrix {
    let t = w.transpose();
    if skew {
        (w - &t).scale_real(0.5)
    } else {
        (w + &t).scale_real(0.5)
    }
}

fn vec_column(v: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_vec(v.rows() * v.cols(), 1, v.as_slice().to_vec())
}

/// Complex Jacobian of `f` at `z` on flattened coordinates.
fn jacobian(f: &HoloMap, z: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (r, c) = z.shape();
    let n = r * c;
    let mut jac = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let mut e = ComplexMatrix::zeros(r, c);
        e.as_mut_slice()[k] = ONE;
        let col = f.differential(z, &e)?;
        for (i, x) in col.as_slice().iter().enumerate() {
            jac[(i, k)] = *x;
        }
    }
    Ok(jac)
}

fn newton_inverse(forward: &HoloMap, seed: &ComplexMatrix, w: &ComplexMatrix) -> Result<ComplexMatrix> {
    let tol = 1e-14 * (1.0 + w.frobenius_norm());
    let starts = [seed.clone(), forward.source.zero()];
    for start in starts.iter() {
        let mut z = start.clone();
        let mut res = &forward.apply(&z)? - w;
        let mut ok = false;
        for _ in 0..NEWTON_MAX_ITER {
            let rn = res.frobenius_norm();
            if rn <= tol {
                ok = true;
                break;
            }
            let jac = match jacobian(forward, &z) {
                Ok(j) => j,
                Err(_) => break,
            };
            let delta = match jac.solve(&vec_column(&res)) {
                Ok(d) => ComplexMatrix::from_vec(z.rows(), z.cols(), d.into_vec()),
                Err(_) => break,
            };
            let mut step = 1.0;
            let mut improved = false;
            while step > 1e-10 {
                let cand = &z - &delta.scale_real(step);
                if forward.source.contains(&cand)? {
                    let cres = &forward.apply(&cand)? - w;
                    if cres.frobenius_norm() < rn {
                        z = cand;
                        res = cres;
                        improved = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !improved {
                // at the rounding floor no step reduces the residual
                ok = rn <= 1e3 * tol;
                break;
            }
        }
        if ok {
            return Ok(z);
        }
    }
    Err(numeric("Newton inversion did not converge"))
}

fn check_gap(m: &ComplexMatrix) -> Result<()> {
    let spec = hermitian_eigs(&m.hermitian_part())?;
    if spec.min() <= MIN_GAP {
        return Err(numeric(
            "base point too close to the boundary for a normalizing automorphism",
        ));
    }
    Ok(())
}

/// The automorphism `Φ_{Z₀}` with `Φ_{Z₀}(Z₀) = 0`, built from Hermitian
/// positive-definite square roots.
pub fn normalizing_automorphism(spec: &DomainSpec, z0: &ComplexMatrix) -> Result<HoloMap> {
    if !spec.contains(z0)? {
        return Err(domain(format!("base point outside {spec}")));
    }
    let body = match spec.kind {
        DomainKind::I | DomainKind::II | DomainKind::III => {
            let gap_left = &ComplexMatrix::identity(spec.m) - &z0.gram();
            check_gap(&gap_left)?;
            let a = pd_sqrt(&gap_left.inverse()?)?;
            let (d, d_inv) = if spec.kind == DomainKind::I {
                let gap_right = &ComplexMatrix::identity(spec.n) - &(&z0.adjoint() * z0);
                check_gap(&gap_right)?;
                (pd_sqrt(&gap_right.inverse()?)?, pd_sqrt(&gap_right)?)
            } else {
                (a.conj(), pd_sqrt(&gap_left)?.conj())
            };
            MapBody::Mobius {
                z0: z0.clone(),
                a,
                d,
                d_inv,
            }
        }
        DomainKind::IV => {
            let (x0, a, d) = iv_factors(z0)?;
            MapBody::TypeIv {
                z0: z0.clone(),
                x0,
                a,
                d,
            }
        }
    };
    Ok(HoloMap {
        source: *spec,
        target: *spec,
        body,
    })
}

/// `X₀`, `A`, `D` for the type IV normalizing map at `z₀`.
fn iv_factors(z0: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix, ComplexMatrix)> {
    let n = z0.cols();
    let (_, q0) = iv_invariants(z0);
    let denom = 1.0 - q0.norm_sqr();
    let zb = z0.conj();
    let row1 = &z0.scale(q0.conj() - ONE) + &zb.scale(q0 - ONE);
    let row2 = &zb.scale(I * (q0 + ONE)) - &z0.scale(I * (q0.conj() + ONE));
    let mut x0 = ComplexMatrix::zeros(2, n);
    for j in 0..n {
        x0[(0, j)] = -row1[(0, j)] / denom;
        x0[(1, j)] = -row2[(0, j)] / denom;
    }
    if x0.max_imag() > 1e-10 * (1.0 + x0.max_abs()) {
        return Err(numeric("type IV factor X₀ is not real"));
    }
    let x0 = x0.real_part();
    let left = &ComplexMatrix::identity(2) - &(&x0 * &x0.transpose());
    check_gap(&left)?;
    let right = &ComplexMatrix::identity(n) - &(&x0.transpose() * &x0);
    let a = pd_sqrt(&left.inverse()?)?.real_part();
    let d = pd_sqrt(&right.inverse()?)?.real_part();
    Ok((x0, a, d))
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize, real: bool) -> ComplexMatrix {
    loop {
        let g = ComplexMatrix::from_fn(n, n, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = if real { 0.0 } else { rng.sample(StandardNormal) };
            C64::new(re, im)
        });
        if let Ok(q) = orthonormalize_columns(&g) {
            return q;
        }
    }
}

/// Seeded element of the isotropy group at the origin.
pub fn isotropy_element(spec: &DomainSpec, seed: u64) -> HoloMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (left, right) = match spec.kind {
        DomainKind::I => {
            let a = random_unitary(&mut rng, spec.m, false);
            let d = random_unitary(&mut rng, spec.n, false);
            (a, d.adjoint())
        }
        DomainKind::II | DomainKind::III => {
            let a = random_unitary(&mut rng, spec.m, false);
            let at = a.transpose();
            (a, at)
        }
        DomainKind::IV => {
            let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let d = random_unitary(&mut rng, spec.n, true);
            (ComplexMatrix::from_vec(1, 1, vec![C64::from_polar(1.0, theta)]), d)
        }
    };
    HoloMap {
        source: *spec,
        target: *spec,
        body: MapBody::Isotropy { left, right },
    }
}

/// `ψ ∘ Φ_{Z₀}` for a seeded interior `Z₀` and isotropy element `ψ`.
pub fn random_automorphism(spec: &DomainSpec, seed: u64) -> Result<HoloMap> {
    let z0 = spec.sample_point(derive_seed(seed, 0xA0, 0));
    let phi = normalizing_automorphism(spec, &z0)?;
    let iso = isotropy_element(spec, derive_seed(seed, 0xA1, 0));
    HoloMap::compose(iso, phi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn domains() -> Vec<DomainSpec> {
        vec![
            DomainSpec::type_i(2, 3).unwrap(),
            DomainSpec::type_ii(3).unwrap(),
            DomainSpec::type_iii(4).unwrap(),
            DomainSpec::type_iv(3).unwrap(),
        ]
    }

    #[test]
    fn normalizing_map_sends_base_to_origin() {
        for d in domains() {
            for seed in 0..20 {
                let z0 = d.sample_point(seed);
                let phi = normalizing_automorphism(&d, &z0).unwrap();
                let w = phi.apply(&z0).unwrap();
                assert!(w.max_abs() <= 1e-10, "{d}: {}", w.max_abs());
            }
        }
    }

    #[test]
    fn origin_gives_identity() {
        for d in domains() {
            let phi = normalizing_automorphism(&d, &d.zero()).unwrap();
            let z = d.sample_point(3);
            assert!((&phi.apply(&z).unwrap() - &z).max_abs() < 1e-14, "{d}");
        }
    }

    #[test]
    fn disc_reduces_to_scalar_mobius() {
        let d = DomainSpec::type_i(1, 1).unwrap();
        let a = C64::new(0.3, -0.4);
        let phi = normalizing_automorphism(&d, &ComplexMatrix::from_vec(1, 1, vec![a])).unwrap();
        for z in [C64::new(0.1, 0.2), C64::new(-0.5, 0.0), C64::new(0.0, 0.7)] {
            let w = phi.apply(&ComplexMatrix::from_vec(1, 1, vec![z])).unwrap()[(0, 0)];
            let expect = (z - a) / (ONE - a.conj() * z);
            let ratio = w / expect;
            assert!((ratio.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn automorphisms_preserve_membership_and_class() {
        for d in domains() {
            let f = random_automorphism(&d, 17).unwrap();
            for seed in 100..150 {
                let w = f.apply(&d.sample_point(seed)).unwrap();
                assert!(d.contains(&w).unwrap(), "{d}");
            }
        }
    }

    #[test]
    fn inverse_round_trip() {
        for d in domains() {
            for seed in 0..5 {
                let f = random_automorphism(&d, seed).unwrap();
                let g = f.invert().unwrap();
                let z = d.sample_point(seed + 1000);
                let back = g.apply(&f.apply(&z).unwrap()).unwrap();
                assert!((&back - &z).max_abs() < 1e-9, "{d}: {}", (&back - &z).max_abs());
            }
        }
    }

    #[test]
    fn analytic_differentials_match_contour() {
        for d in domains() {
            let f = random_automorphism(&d, 5).unwrap();
            let inv = f.invert().unwrap();
            for seed in 0..5 {
                let z = d.sample_point(seed + 50);
                let v = d.sample_tangent(seed + 60);
                for map in [&f, &inv] {
                    let a = map.differential(&z, &v).unwrap();
                    let n = map.numeric_differential(&z, &v).unwrap();
                    let rel = (&a - &n).frobenius_norm() / n.frobenius_norm();
                    assert!(rel < 1e-9, "{d}: {rel}");
                }
            }
        }
    }

    #[test]
    fn isotropy_fixes_origin_and_preserves_iv_invariants() {
        let d = DomainSpec::type_iv(4).unwrap();
        let iso = isotropy_element(&d, 3);
        assert!(iso.apply(&d.zero()).unwrap().max_abs() == 0.0);
        let z = d.sample_point(8);
        let w = iso.apply(&z).unwrap();
        let (r0, q0) = iv_invariants(&z);
        let (r1, q1) = iv_invariants(&w);
        assert!((r0 - r1).abs() < 1e-14 && (q0.norm() - q1.norm()).abs() < 1e-14);
        let ii = DomainSpec::type_ii(3).unwrap();
        let s = isotropy_element(&ii, 4).apply(&ii.sample_point(1)).unwrap();
        assert!((&s - &s.transpose()).max_abs() < 1e-14);
    }

    #[test]
    fn non_automorphisms_do_not_invert() {
        let d = DomainSpec::type_i(2, 2).unwrap();
        let c = HoloMap::constant(d, d, d.zero()).unwrap();
        assert!(matches!(c.invert(), Err(crate::FinslerError::Structural(_))));
    }

    #[test]
    fn near_boundary_base_is_rejected() {
        let d = DomainSpec::type_i(1, 1).unwrap();
        let z0 = ComplexMatrix::from_real(1, 1, &[1.0 - 1e-13]);
        assert!(normalizing_automorphism(&d, &z0).is_err());
    }

    #[test]
    fn polynomial_differential_matches_contour() {
        let d = DomainSpec::type_i(2, 2).unwrap();
        let f = HoloMap {
            source: d,
            target: d,
            body: MapBody::Polynomial {
                c0: ComplexMatrix::zeros(2, 2),
                left: d.sample_tangent(1).scale_real(0.1),
                right: d.sample_tangent(2).scale_real(0.1),
                m1: d.sample_tangent(3).scale_real(0.1),
                m2: d.sample_tangent(4).scale_real(0.1),
                m3: d.sample_tangent(5).scale_real(0.1),
                scale: 0.5,
            },
        };
        let z = d.sample_point(6);
        let v = d.sample_tangent(7);
        let a = f.differential(&z, &v).unwrap();
        let n = f.numeric_differential(&z, &v).unwrap();
        assert!((&a - &n).frobenius_norm() < 1e-12 * (1.0 + a.frobenius_norm()));
    }
}
