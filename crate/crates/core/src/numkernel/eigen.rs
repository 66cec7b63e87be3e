use serde::Serialize;

use super::matrix::{ComplexMatrix, C64, ONE};
use crate::error::{domain, numeric, structural, Result};

const MAX_SWEEPS: usize = 100;
const OFF_DIAG_TOL: f64 = 1e-14;
const HERMITIAN_TOL: f64 = 1e-12;
const PSD_CLAMP: f64 = 1e-10;

/// Eigen pairs of a Hermitian matrix, eigenvalues descending. Column `j` of
/// `vectors` belongs to `values[j]`.
#[derive(Debug, Clone, Serialize)]
pub struct HermitianSpectrum {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianSpectrum {
    /// `U diag(f(λ)) U*`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let u = &self.vectors;
        let fl: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| (0..n).map(|k| u[(i, k)] * u[(j, k)].conj() * fl[k]).sum())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| l)
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
pub fn hermitian_eigs(m: &ComplexMatrix) -> Result<HermitianSpectrum> {
    if !m.is_square() {
        return Err(structural(format!(
            "eigendecomposition of a non-square {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_hermitian(HERMITIAN_TOL) {
        return Err(structural("matrix is not Hermitian"));
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm();
    let threshold = OFF_DIAG_TOL * scale;

    let off = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = scale == 0.0 || off(&a) <= threshold;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(numeric("Jacobi eigensolver did not converge"));
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / mag;
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on the (p, q) plane.
                let jpp = C64::new(c, 0.0);
                let jpq = C64::new(s, 0.0);
                let jqp = -phase.conj() * s;
                let jqq = phase.conj() * c;
                // A <- A J
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                }
                // A <- J* A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
            }
        }
        converged = off(&a) <= threshold;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianSpectrum { values, vectors })
}

/// Eigenvalues of a PSD matrix with the tiny negative ones clamped to zero.
pub fn psd_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let spec = hermitian_eigs(m)?;
    let floor = -PSD_CLAMP * m.frobenius_norm();
    spec.values
        .iter()
        .map(|&l| {
            if l >= 0.0 {
                Ok(l)
            } else if l >= floor {
                Ok(0.0)
            } else {
                Err(domain(format!("matrix has a negative eigenvalue {l:.3e}")))
            }
        })
        .collect()
}

/// Hermitian positive-definite square root `A` with `A*A = M`.
pub fn pd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spec = hermitian_eigs(m)?;
    let max = spec.max();
    if max.is_nan() || max <= 0.0 || spec.min() <= 1e-12 * max {
        return Err(domain("matrix is not positive definite"));
    }
    Ok(spec.reconstruct_with(f64::sqrt))
}

/// `tr(M^α)` for Hermitian PSD `M`.
pub fn power_trace(m: &ComplexMatrix, alpha: u32) -> Result<f64> {
    if alpha == 0 {
        return Err(structural("power trace needs a positive exponent"));
    }
    Ok(psd_eigenvalues(m)?.iter().map(|&l| l.powi(alpha as i32)).sum())
}

/// Singular values in descending order, computed from the smaller Gram
/// matrix.
pub fn singular_values(v: &ComplexMatrix) -> Vec<f64> {
    let gram = if v.rows() <= v.cols() {
        v.gram()
    } else {
        v.adjoint().gram()
    };
    if gram.rows() == 0 {
        return Vec::new();
    }
    // A Gram matrix is Hermitian PSD by construction; Jacobi only fails on
    // non-finite input.
    match hermitian_eigs(&gram) {
        Ok(spec) => spec.values.iter().map(|&l| l.max(0.0).sqrt()).collect(),
        Err(_) => vec![f64::NAN; gram.rows()],
    }
}

/// Largest singular value.
pub fn operator_norm(v: &ComplexMatrix) -> f64 {
    singular_values(v).first().copied().unwrap_or(0.0)
}

/// Power sums `S_1..S_k` of a real spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerSums(pub Vec<f64>);

impl PowerSums {
    pub fn from_spectrum(lambda: &[f64], k: usize) -> Self {
        Self(
            (1..=k)
                .map(|a| lambda.iter().map(|&l| l.powi(a as i32)).sum())
                .collect(),
        )
    }

    /// `S_α`, one-based.
    pub fn get(&self, alpha: usize) -> f64 {
        self.0[alpha - 1]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Elementary symmetric values `σ_1..σ_k` from power sums via Newton's
/// identities.
pub fn newton_power_to_elementary(s: &PowerSums, k: usize) -> Vec<f64> {
    assert!(s.len() >= k, "need at least {k} power sums");
    let mut sigma = vec![1.0];
    for a in 1..=k {
        let mut acc = 0.0;
        for i in 1..=a {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * sigma[a - i] * s.get(i);
        }
        sigma.push(acc / a as f64);
    }
    sigma.remove(0);
    sigma
}

/// Unitary matrix from the QR factorisation of `m` (modified Gram-Schmidt),
/// used to draw Haar-like unitaries.
pub fn orthonormalize_columns(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (r, c) = m.shape();
    let mut q = m.clone();
    for j in 0..c {
        for k in 0..j {
            let mut dot = C64::new(0.0, 0.0);
            for i in 0..r {
                dot += q[(i, k)].conj() * q[(i, j)];
            }
            for i in 0..r {
                let qik = q[(i, k)];
                q[(i, j)] -= dot * qik;
            }
        }
        let norm: f64 = (0..r).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(numeric("rank-deficient input to orthonormalisation"));
        }
        for i in 0..r {
            q[(i, j)] *= ONE / norm;
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(r, c, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        random_matrix(rng, n, n).hermitian_part()
    }

    #[test]
    fn diagonal_and_identity() {
        let d = ComplexMatrix::diag_real(2, 2, &[1.0, 3.0]);
        assert_eq!(hermitian_eigs(&d).unwrap().values, vec![3.0, 1.0]);
        let i3 = hermitian_eigs(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(i3.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn reconstruction_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 4, 7, 12] {
            let m = random_hermitian(&mut rng, n);
            let spec = hermitian_eigs(&m).unwrap();
            let res = (&spec.reconstruct() - &m).frobenius_norm();
            assert!(res <= 1e-10 * m.frobenius_norm(), "n={n} residual {res}");
            let u = &spec.vectors;
            let uu = &u.adjoint() * u;
            assert!((&uu - &ComplexMatrix::identity(n)).max_abs() < 1e-12);
            assert!(spec.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(hermitian_eigs(&m), Err(crate::FinslerError::Structural(_))));
    }

    #[test]
    fn pd_sqrt_cases() {
        let a = pd_sqrt(&ComplexMatrix::diag_real(2, 2, &[4.0, 9.0])).unwrap();
        assert!((&a - &ComplexMatrix::diag_real(2, 2, &[2.0, 3.0])).max_abs() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_matrix(&mut rng, 3, 3);
        let m = &x.gram() + &ComplexMatrix::identity(3);
        let a = pd_sqrt(&m).unwrap();
        assert!(a.is_hermitian(1e-12));
        assert!((&(&a.adjoint() * &a) - &m).frobenius_norm() <= 1e-10 * m.frobenius_norm());
        assert!(pd_sqrt(&ComplexMatrix::diag_real(2, 2, &[1.0, 0.0])).is_err());
    }

    #[test]
    fn power_trace_cases() {
        assert_eq!(power_trace(&ComplexMatrix::identity(3), 5).unwrap(), 3.0);
        let d = ComplexMatrix::diag_real(2, 2, &[2.0, 3.0]);
        assert!((power_trace(&d, 2).unwrap() - 13.0).abs() < 1e-13);
        let neg = ComplexMatrix::diag_real(2, 2, &[1.0, -0.5]);
        assert!(matches!(power_trace(&neg, 2), Err(crate::FinslerError::Domain(_))));
    }

    #[test]
    fn singular_value_cases() {
        assert_eq!(singular_values(&ComplexMatrix::zeros(2, 3)), vec![0.0, 0.0]);
        let v = ComplexMatrix::from_real(2, 3, &[1., 0., 0., 0., 2., 0.]);
        let s = singular_values(&v);
        assert!((s[0] - 2.0).abs() < 1e-14 && (s[1] - 1.0).abs() < 1e-14);
        assert_eq!(singular_values(&v.adjoint()).len(), 2);
    }

    #[test]
    fn newton_small_cases() {
        assert_eq!(newton_power_to_elementary(&PowerSums(vec![2.5]), 1), vec![2.5]);
        let s = newton_power_to_elementary(&PowerSums(vec![2.0, 2.0]), 2);
        assert!((s[0] - 2.0).abs() < 1e-15 && (s[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn orthonormalize_gives_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let q = orthonormalize_columns(&random_matrix(&mut rng, 4, 4)).unwrap();
        assert!((&(&q.adjoint() * &q) - &ComplexMatrix::identity(4)).max_abs() < 1e-13);
    }
}
