use rayon::prelude::*;
use serde::Serialize;

use super::MetricSpec;
use crate::diff::wirtinger;
use crate::domains::{derive_seed, DomainSpec};
use crate::error::Result;
use crate::numkernel::{ComplexMatrix, C64};

/// Chern-Finsler coefficients at one `(z;v)`.
#[derive(Debug, Clone, Serialize)]
pub struct ConnectionSample {
    /// `Γ_{;i}^l`, row `i`, column `l`.
    pub nonlinear: ComplexMatrix,
    /// `Γ_{j;i}^l` as `horizontal[j][(i, l)]`.
    pub horizontal: Vec<ComplexMatrix>,
}

impl ConnectionSample {
    /// `max |Σ_j Γ_{j;i}^l v_j − Γ_{;i}^l|`.
    pub fn euler_residual(&self, v: &[C64]) -> f64 {
        let r = self.nonlinear.rows();
        let mut acc = ComplexMatrix::zeros(r, r);
        for (j, g) in self.horizontal.iter().enumerate() {
            acc += &g.scale(v[j]);
        }
        (&acc - &self.nonlinear).max_abs()
    }

    /// `max |Γ_{j;i}^l − Γ_{i;j}^l|`.
    pub fn symmetry_residual(&self) -> f64 {
        let r = self.nonlinear.rows();
        let mut worst: f64 = 0.0;
        for j in 0..r {
            for i in 0..r {
                for l in 0..r {
                    let d = self.horizontal[j][(i, l)] - self.horizontal[i][(j, l)];
                    worst = worst.max(d.norm());
                }
            }
        }
        worst
    }
}

/// Base-point step for differences in `Z`: small against both the point's
/// size and its distance to the boundary.
pub fn z_step(domain: &DomainSpec, z: &ComplexMatrix) -> f64 {
    let size = 1e-4 * (1.0 + z.frobenius_norm());
    let room = 1e-3 * (1.0 - domain.gauge(z)).max(0.0);
    size.min(room)
}

/// `∂²F²/∂z_i∂v̄_s`, row `i`, column `s`, in packed coordinates.
pub fn mixed_derivative(metric: &MetricSpec, z: &ComplexMatrix, v: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = &metric.domain;
    d.check_shape(v)?;
    metric.frame(z)?;
    let h = z_step(d, z);
    let basis = d.basis();
    let r = basis.len();
    let mut out = ComplexMatrix::zeros(r, r);
    for (i, b) in basis.iter().enumerate() {
        let row = wirtinger(|w| metric.gradient_vbar(&(z + &b.scale(w)), v), h)?;
        for (s, x) in row.into_iter().enumerate() {
            out[(i, s)] = x;
        }
    }
    Ok(out)
}

/// `Γ_{;i}^l = Σ_s (∂_i ∂G/∂v̄_s) G^{s̄l}`.
pub fn nonlinear_connection(metric: &MetricSpec, z: &ComplexMatrix, v: &ComplexMatrix) -> Result<ComplexMatrix> {
    let m = mixed_derivative(metric, z, v)?;
    let g = metric.fundamental_tensor(z, v)?.matrix;
    g.solve_right(&m)
}

/// Both connections at `(z;v)`; the horizontal part is the holomorphic
/// `v`-derivative of the nonlinear one.
pub fn horizontal_connection(metric: &MetricSpec, z: &ComplexMatrix, v: &ComplexMatrix) -> Result<ConnectionSample> {
    let d = &metric.domain;
    let nonlinear = nonlinear_connection(metric, z, v)?;
    let h = 1e-3 * v.frobenius_norm();
    let horizontal = d
        .basis()
        .iter()
        .map(|b| {
            let flat = wirtinger(
                |w| Ok(nonlinear_connection(metric, z, &(v + &b.scale(w)))?.into_vec()),
                h,
            )?;
            Ok(ComplexMatrix::from_vec(nonlinear.rows(), nonlinear.cols(), flat))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConnectionSample { nonlinear, horizontal })
}

/// Hermitian connection `Γ_{ij}^l` of the Bergman metric, as `[j][(i, l)]`.
pub fn bergman_connection(domain: &DomainSpec, z: &ComplexMatrix) -> Result<Vec<ComplexMatrix>> {
    let bergman = MetricSpec::bergman(*domain);
    let basis = domain.basis();
    let r = basis.len();
    let probe = &basis[0];
    let g = bergman.fundamental_tensor(z, probe)?.matrix;
    let h = z_step(domain, z);
    // dg[i] = ∂_i (G_{jk̄}) with rows j, columns k
    let dg = basis
        .iter()
        .map(|b| {
            let flat = wirtinger(
                |w| Ok(bergman.fundamental_tensor(&(z + &b.scale(w)), probe)?.matrix.into_vec()),
                h,
            )?;
            g.solve_right(&ComplexMatrix::from_vec(r, r, flat))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((0..r)
        .map(|j| ComplexMatrix::from_fn(r, r, |i, l| dg[i][(j, l)]))
        .collect())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct KahlerBerwaldTolerances {
    pub mixed: f64,
    pub independence: f64,
    pub symmetry: f64,
    pub bergman: f64,
}

impl Default for KahlerBerwaldTolerances {
    fn default() -> Self {
        Self {
            mixed: 1e-6,
            independence: 1e-5,
            symmetry: 1e-5,
            bergman: 1e-5,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KbWitness {
    pub check: String,
    pub z: ComplexMatrix,
    pub v: ComplexMatrix,
    pub residual: f64,
}

/// Residuals are absolute for the mixed derivative (taken at `F(0;V) = 1`)
/// and scaled by `max(1, max|Γ_B|)` for the connection checks.
#[derive(Debug, Clone, Serialize)]
pub struct KahlerBerwaldReport {
    pub metric: String,
    pub mixed_residual: f64,
    pub independence_residual: f64,
    pub symmetry_residual: f64,
    pub bergman_residual: f64,
    pub euler_residual: f64,
    pub pass: bool,
    pub witness: Option<KbWitness>,
}

/// Fibre directions tried at each base point.
const FIBRE_SAMPLES: usize = 10;

struct Worst {
    value: f64,
    z: ComplexMatrix,
    v: ComplexMatrix,
}

fn keep(a: Option<Worst>, b: Option<Worst>) -> Option<Worst> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if b.value > a.value { b } else { a }),
        (a, None) => a,
        (None, b) => b,
    }
}

/// Mixed-derivative criterion at the origin plus Berwald, Kähler and Bergman
/// comparisons of `Γ_{j;i}^l` at `samples` random base points.
pub fn verify_kahler_berwald(
    metric: &MetricSpec,
    samples: usize,
    seed: u64,
    tol: &KahlerBerwaldTolerances,
) -> Result<KahlerBerwaldReport> {
    let d = metric.domain;
    let zero = d.zero();
    let mixed = (0..samples.max(1))
        .into_par_iter()
        .map(|k| -> Result<Option<Worst>> {
            let v = d.sample_tangent(derive_seed(seed, 1, k as u64));
            let v = v.scale_real(1.0 / metric.eval(&zero, &v)?);
            let value = mixed_derivative(metric, &zero, &v)?.max_abs();
            Ok(Some(Worst {
                value,
                z: zero.clone(),
                v,
            }))
        })
        .try_reduce(|| None, |a, b| Ok(keep(a, b)))?;

    type Four = [Option<Worst>; 4];
    let per_point = (0..samples.max(1))
        .into_par_iter()
        .map(|k| -> Result<Four> {
            let z = d.sample_point_within(derive_seed(seed, 2, k as u64), 0.6);
            let reference = bergman_connection(&d, &z)?;
            let scale = reference.iter().map(|g| g.max_abs()).fold(1.0, f64::max);
            let mut out: Four = Default::default();
            let mut first: Option<Vec<ComplexMatrix>> = None;
            for f in 0..FIBRE_SAMPLES {
                let v = d.sample_tangent(derive_seed(seed, 3, (k * FIBRE_SAMPLES + f) as u64));
                let sample = horizontal_connection(metric, &z, &v)?;
                let base = first.get_or_insert_with(|| sample.horizontal.clone());
                let indep = base
                    .iter()
                    .zip(&sample.horizontal)
                    .map(|(a, b)| (a - b).max_abs())
                    .fold(0.0, f64::max);
                let berg = reference
                    .iter()
                    .zip(&sample.horizontal)
                    .map(|(a, b)| (a - b).max_abs())
                    .fold(0.0, f64::max);
                let euler = sample.euler_residual(&d.pack(&v));
                let values = [indep, sample.symmetry_residual(), berg, euler];
                for (slot, value) in out.iter_mut().zip(values) {
                    let w = Worst {
                        value: value / scale,
                        z: z.clone(),
                        v: v.clone(),
                    };
                    *slot = keep(slot.take(), Some(w));
                }
            }
            Ok(out)
        })
        .try_reduce(Four::default, |a, b| {
            let [a0, a1, a2, a3] = a;
            let [b0, b1, b2, b3] = b;
            Ok([keep(a0, b0), keep(a1, b1), keep(a2, b2), keep(a3, b3)])
        })?;

    let value = |w: &Option<Worst>| w.as_ref().map_or(0.0, |w| w.value);
    let [indep, sym, berg, euler] = per_point;
    let checks = [
        ("mixed derivative at the origin", &mixed, tol.mixed),
        ("fibre independence", &indep, tol.independence),
        ("symmetry", &sym, tol.symmetry),
        ("bergman connection", &berg, tol.bergman),
    ];
    let witness = checks.iter().find(|(_, w, t)| value(w) > *t).and_then(|(name, w, _)| {
        w.as_ref().map(|w| KbWitness {
            check: name.to_string(),
            z: w.z.clone(),
            v: w.v.clone(),
            residual: w.value,
        })
    });
    Ok(KahlerBerwaldReport {
        metric: metric.label(),
        mixed_residual: value(&mixed),
        independence_residual: value(&indep),
        symmetry_residual: value(&sym),
        bergman_residual: value(&berg),
        euler_residual: value(&euler),
        pass: witness.is_none(),
        witness,
    })
}
