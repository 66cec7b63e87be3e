//! The four classical domains, membership, tangent symmetry classes and
//! seeded sampling.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{structural, Result};
use crate::numkernel::{hermitian_eigs, operator_norm, ComplexMatrix, C64};

/// Strict interior margin used by [`DomainSpec::contains`].
pub const MEMBERSHIP_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DomainKind {
    I,
    II,
    III,
    IV,
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DomainKind::I => "I",
            DomainKind::II => "II",
            DomainKind::III => "III",
            DomainKind::IV => "IV",
        };
        f.write_str(s)
    }
}

/// A classical domain with its dimensions. Points are stored as `m × n`
/// matrices for types I-III (full symmetric or skew matrices for II and III)
/// and as `1 × N` rows for type IV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub m: usize,
    pub n: usize,
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            DomainKind::I => write!(f, "I({},{})", self.m, self.n),
            DomainKind::II | DomainKind::III => write!(f, "{}({})", self.kind, self.m),
            DomainKind::IV => write!(f, "IV({})", self.n),
        }
    }
}

impl DomainSpec {
    pub fn type_i(m: usize, n: usize) -> Result<Self> {
        Self {
            kind: DomainKind::I,
            m,
            n,
        }
        .validated()
    }

    pub fn type_ii(m: usize) -> Result<Self> {
        Self {
            kind: DomainKind::II,
            m,
            n: m,
        }
        .validated()
    }

    pub fn type_iii(m: usize) -> Result<Self> {
        Self {
            kind: DomainKind::III,
            m,
            n: m,
        }
        .validated()
    }

    pub fn type_iv(n: usize) -> Result<Self> {
        Self {
            kind: DomainKind::IV,
            m: 1,
            n,
        }
        .validated()
    }

    /// Checks the dimension constraints of the kind.
    pub fn validated(self) -> Result<Self> {
        let ok = match self.kind {
            DomainKind::I => self.m >= 1 && self.m <= self.n,
            DomainKind::II => self.m >= 1 && self.n == self.m,
            // III(1) is a point
            DomainKind::III => self.m >= 2 && self.n == self.m,
            DomainKind::IV => self.m == 1 && self.n >= 2,
        };
        if ok {
            Ok(self)
        } else {
            Err(structural(format!(
                "invalid dimensions m={}, n={} for a type {} domain",
                self.m, self.n, self.kind
            )))
        }
    }

    /// Shape of a point matrix.
    pub fn shape(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    /// Complex dimension of the domain.
    pub fn dim(&self) -> usize {
        match self.kind {
            DomainKind::I => self.m * self.n,
            DomainKind::II => self.m * (self.m + 1) / 2,
            DomainKind::III => self.m * (self.m - 1) / 2,
            DomainKind::IV => self.n,
        }
    }

    pub fn rank(&self) -> usize {
        match self.kind {
            DomainKind::I | DomainKind::II => self.m,
            DomainKind::III => self.m / 2,
            DomainKind::IV => 2,
        }
    }

    /// Number of free entries in a singular-value profile of a tangent
    /// vector at the origin (the `s` parameter for type IV).
    pub fn profile_len(&self) -> usize {
        match self.kind {
            DomainKind::I | DomainKind::II => self.m,
            DomainKind::III => self.m / 2,
            DomainKind::IV => 1,
        }
    }

    pub fn zero(&self) -> ComplexMatrix {
        ComplexMatrix::zeros(self.m, self.n)
    }

    /// Verifies shape and the symmetry class of `z`.
    pub fn check_shape(&self, z: &ComplexMatrix) -> Result<()> {
        if z.shape() != self.shape() {
            return Err(structural(format!(
                "expected a {}x{} array for {}, got {}x{}",
                self.m,
                self.n,
                self,
                z.rows(),
                z.cols()
            )));
        }
        let tol = 1e-12 * z.max_abs().max(1.0);
        match self.kind {
            DomainKind::II if (z - &z.transpose()).max_abs() > tol => {
                Err(structural("type II arrays must be symmetric"))
            }
            DomainKind::III if (z + &z.transpose()).max_abs() > tol => {
                Err(structural("type III arrays must be skew-symmetric"))
            }
            _ => Ok(()),
        }
    }

    /// Strict membership with margin [`MEMBERSHIP_MARGIN`].
    pub fn contains(&self, z: &ComplexMatrix) -> Result<bool> {
        self.check_shape(z)?;
        if z.as_slice().iter().any(|x| !x.is_finite()) {
            return Ok(false);
        }
        match self.kind {
            DomainKind::IV => {
                let (r, q) = iv_invariants(z);
                let qa = q.norm();
                Ok(1.0 + qa * qa - 2.0 * r > MEMBERSHIP_MARGIN && 1.0 - qa > MEMBERSHIP_MARGIN)
            }
            _ => {
                let gap = &ComplexMatrix::identity(self.m) - &z.gram();
                Ok(hermitian_eigs(&gap.hermitian_part())?.min() > MEMBERSHIP_MARGIN)
            }
        }
    }

    /// Projection onto the tangent symmetry class.
    pub fn project_tangent(&self, w: &ComplexMatrix) -> ComplexMatrix {
        match self.kind {
            DomainKind::II => (w + &w.transpose()).scale_real(0.5),
            DomainKind::III => (w - &w.transpose()).scale_real(0.5),
            _ => w.clone(),
        }
    }

    /// Index pairs of the independent coordinates, row-major.
    pub fn coordinate_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.dim());
        for i in 0..self.m {
            for j in 0..self.n {
                let keep = match self.kind {
                    DomainKind::I | DomainKind::IV => true,
                    DomainKind::II => j >= i,
                    DomainKind::III => j > i,
                };
                if keep {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Basis of the tangent space in full-array form; coordinate `k` of
    /// [`pack`](Self::pack) multiplies element `k`.
    pub fn basis(&self) -> Vec<ComplexMatrix> {
        self.coordinate_pairs()
            .into_iter()
            .map(|(i, j)| {
                let mut b = self.zero();
                b[(i, j)] = C64::new(1.0, 0.0);
                match self.kind {
                    DomainKind::II if i != j => b[(j, i)] = C64::new(1.0, 0.0),
                    DomainKind::III => b[(j, i)] = C64::new(-1.0, 0.0),
                    _ => {}
                }
                b
            })
            .collect()
    }

    pub fn pack(&self, v: &ComplexMatrix) -> Vec<C64> {
        self.coordinate_pairs().into_iter().map(|(i, j)| v[(i, j)]).collect()
    }

    pub fn unpack(&self, coords: &[C64]) -> ComplexMatrix {
        assert_eq!(coords.len(), self.dim(), "coordinate count mismatch");
        let mut v = self.zero();
        for (&(i, j), &c) in self.coordinate_pairs().iter().zip(coords) {
            v[(i, j)] = c;
            match self.kind {
                DomainKind::II => v[(j, i)] = c,
                DomainKind::III => v[(j, i)] = -c,
                _ => {}
            }
        }
        v
    }

    /// Minkowski functional of the domain, so that `z` is interior iff the
    /// value is below 1.
    pub fn gauge(&self, z: &ComplexMatrix) -> f64 {
        match self.kind {
            DomainKind::IV => {
                let (r, q) = iv_invariants(z);
                (r + (r * r - q.norm_sqr()).max(0.0).sqrt()).sqrt()
            }
            _ => operator_norm(z),
        }
    }

    /// Seeded interior point: Gaussian entries rescaled to a gauge drawn
    /// uniformly from `[0, 0.9]`.
    pub fn sample_point(&self, seed: u64) -> ComplexMatrix {
        self.sample_point_within(seed, 0.9)
    }

    pub fn sample_point_within(&self, seed: u64, max_gauge: f64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = self.gaussian(&mut rng);
        let rho: f64 = rng.random_range(0.0..max_gauge.min(0.999));
        let g = self.gauge(&raw);
        let mut z = raw.scale_real(rho / g);
        // guard against rounding right at the margin
        while !self.contains(&z).unwrap_or(false) {
            z = z.scale_real(0.5);
        }
        z
    }

    /// Seeded nonzero tangent vector of the right symmetry class.
    pub fn sample_tangent(&self, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let v = self.gaussian(&mut rng);
            if v.max_abs() > 1e-8 {
                return v;
            }
        }
    }

    /// Seeded tangent vector scaled so that `norm(v) = 1`.
    pub fn sample_unit_tangent(
        &self,
        seed: u64,
        norm: impl Fn(&ComplexMatrix) -> Result<f64>,
    ) -> Result<ComplexMatrix> {
        let v = self.sample_tangent(seed);
        let f = norm(&v)?;
        Ok(v.scale_real(1.0 / f))
    }

    /// Complex Gaussian draw projected onto the symmetry class.
    pub fn gaussian(&self, rng: &mut impl Rng) -> ComplexMatrix {
        let raw = ComplexMatrix::from_fn(self.m, self.n, |_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        self.project_tangent(&raw)
    }
}

/// `(zz*, zz')` for a row vector.
pub fn iv_invariants(z: &ComplexMatrix) -> (f64, C64) {
    let r = z.as_slice().iter().map(|x| x.norm_sqr()).sum();
    let q = z.as_slice().iter().map(|x| x * x).sum();
    (r, q)
}

/// `1 + |zz'|² − 2zz*`.
pub fn iv_delta(z: &ComplexMatrix) -> f64 {
    let (r, q) = iv_invariants(z);
    1.0 + q.norm_sqr() - 2.0 * r
}

/// A base point with a tangent vector at it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentPoint {
    pub z: ComplexMatrix,
    pub v: ComplexMatrix,
}

impl TangentPoint {
    pub fn new(domain: &DomainSpec, z: ComplexMatrix, v: ComplexMatrix) -> Result<Self> {
        domain.check_shape(&v)?;
        if !domain.contains(&z)? {
            return Err(crate::error::domain(format!("base point outside {domain}")));
        }
        Ok(Self { z, v })
    }

    pub fn origin(domain: &DomainSpec, v: ComplexMatrix) -> Result<Self> {
        Self::new(domain, domain.zero(), v)
    }
}

/// Mixes a master seed with a stream tag and an index into an independent
/// 64-bit seed.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    let mut x = master ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03);
    // splitmix64 finalizer
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions_and_ranks() {
        assert_eq!(DomainSpec::type_i(2, 3).unwrap().dim(), 6);
        assert_eq!(DomainSpec::type_ii(3).unwrap().dim(), 6);
        assert_eq!(DomainSpec::type_iii(4).unwrap().dim(), 6);
        assert_eq!(DomainSpec::type_iii(5).unwrap().rank(), 2);
        assert_eq!(DomainSpec::type_iv(5).unwrap().dim(), 5);
        assert!(DomainSpec::type_i(3, 2).is_err());
        assert!(DomainSpec::type_iv(1).is_err());
        for d in [
            DomainSpec::type_i(2, 3).unwrap(),
            DomainSpec::type_ii(3).unwrap(),
            DomainSpec::type_iii(4).unwrap(),
            DomainSpec::type_iv(4).unwrap(),
        ] {
            assert_eq!(d.basis().len(), d.dim());
        }
    }

    #[test]
    fn membership_examples() {
        let d = DomainSpec::type_i(2, 2).unwrap();
        assert!(d.contains(&d.zero()).unwrap());
        assert!(!d.contains(&ComplexMatrix::identity(2)).unwrap());
        let iv = DomainSpec::type_iv(3).unwrap();
        let z = ComplexMatrix::from_real(1, 3, &[0.5, 0.0, 0.0]);
        assert!((iv_delta(&z) - 0.5625).abs() < 1e-15);
        assert!(iv.contains(&z).unwrap());
    }

    #[test]
    fn membership_rejects_wrong_class() {
        let d = DomainSpec::type_ii(2).unwrap();
        let z = ComplexMatrix::from_real(2, 2, &[0.0, 0.1, 0.0, 0.0]);
        assert!(matches!(d.contains(&z), Err(crate::FinslerError::Structural(_))));
        let d = DomainSpec::type_i(2, 2).unwrap();
        assert!(d.contains(&ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn projection_cases() {
        let ii = DomainSpec::type_ii(3).unwrap();
        let iii = DomainSpec::type_iii(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = DomainSpec::type_i(3, 3).unwrap().gaussian(&mut rng);
        let s = ii.project_tangent(&w);
        assert_eq!(ii.project_tangent(&s), s);
        assert!(iii.project_tangent(&s).max_abs() < 1e-15);
        let k = iii.project_tangent(&w);
        assert!((&iii.project_tangent(&k) - &k).max_abs() < 1e-15);
    }

    #[test]
    fn pack_round_trip() {
        for d in [
            DomainSpec::type_i(2, 3).unwrap(),
            DomainSpec::type_ii(3).unwrap(),
            DomainSpec::type_iii(4).unwrap(),
            DomainSpec::type_iv(3).unwrap(),
        ] {
            let v = d.sample_tangent(5);
            assert!((&d.unpack(&d.pack(&v)) - &v).max_abs() < 1e-15);
            let coords = d.pack(&v);
            let mut acc = d.zero();
            for (b, c) in d.basis().iter().zip(&coords) {
                acc += &b.scale(*c);
            }
            assert!((&acc - &v).max_abs() < 1e-15);
        }
    }

    #[test]
    fn sampling_is_deterministic_and_interior() {
        let d = DomainSpec::type_i(2, 2).unwrap();
        assert_eq!(d.sample_point(42), d.sample_point(42));
        for seed in 0..1000 {
            let z = d.sample_point(seed);
            let gap = &ComplexMatrix::identity(2) - &z.gram();
            assert!(hermitian_eigs(&gap.hermitian_part()).unwrap().min() > 0.0);
        }
        let iii = DomainSpec::type_iii(3).unwrap();
        let v = iii.sample_tangent(9);
        assert!((&v + &v.transpose()).max_abs() < 1e-15);
        assert_eq!(iii.sample_tangent(9), v);
    }

    #[test]
    fn unit_tangent_normalisation() {
        let d = DomainSpec::type_i(2, 3).unwrap();
        let v = d.sample_unit_tangent(3, |v| Ok(v.frobenius_norm())).unwrap();
        assert!((v.frobenius_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gauge_matches_membership_scaling() {
        let iv = DomainSpec::type_iv(4).unwrap();
        for seed in 0..50 {
            let z = iv.sample_tangent(seed);
            let g = iv.gauge(&z);
            assert!(iv.contains(&z.scale_real(0.999 / g)).unwrap());
            assert!(!iv.contains(&z.scale_real(1.001 / g)).unwrap());
        }
    }

    #[test]
    fn seeds_differ_across_streams() {
        assert_ne!(derive_seed(1, 0, 0), derive_seed(1, 1, 0));
        assert_ne!(derive_seed(1, 0, 0), derive_seed(1, 0, 1));
        assert_eq!(derive_seed(7, 3, 2), derive_seed(7, 3, 2));
    }
}
