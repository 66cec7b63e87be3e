//! Randomised check of the Schwarz lemma `f*F₂ ≤ √(K₁/K₂)·F₁` over a corpus
//! of holomorphic maps between classical domains.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::automorphisms::{isotropy_element, random_automorphism, HoloMap, MapBody};
use crate::curvature::{fibre_vector, profile_vector, CurvatureReport};
use crate::domains::{derive_seed, DomainKind, DomainSpec};
use crate::error::{structural, Result};
use crate::metrics::MetricSpec;
use crate::numkernel::{operator_norm, ComplexMatrix, C64, ONE};

pub const PROBES: usize = 200;
pub const MAX_HALVINGS: usize = 20;
/// A margin below `−VIOLATION_TOL·F₁` is a violation.
pub const VIOLATION_TOL: f64 = 1e-8;

/// `√(K₁/K₂)` with `K₁` from the source metric and `K₂` from the target.
pub fn schwarz_bound(source: &CurvatureReport, target: &CurvatureReport) -> f64 {
    (source.k1 / target.k2).sqrt()
}

/// A sample `(Z;V)` with its image `(f(Z); f_*V)`.
#[derive(Debug, Clone)]
pub struct Pushforward {
    pub z: ComplexMatrix,
    pub v: ComplexMatrix,
    pub fz: ComplexMatrix,
    pub fv: ComplexMatrix,
}

#[derive(Debug, Clone, Serialize)]
pub struct SchwarzWitness {
    pub map: String,
    pub z: ComplexMatrix,
    pub v: ComplexMatrix,
    pub f1: f64,
    pub f2: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SchwarzReport {
    pub source_metric: String,
    pub target_metric: String,
    pub bound: f64,
    pub maps: usize,
    pub samples: usize,
    /// Smallest `(bound·F₁ − f*F₂)/F₁`.
    pub min_margin: f64,
    /// Largest `f*F₂/F₁`.
    pub sup_ratio: f64,
    pub violations: usize,
    pub pass: bool,
    pub witness: Option<SchwarzWitness>,
}

fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Gaussian matrix scaled to operator norm one.
fn contraction(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    loop {
        let g = gaussian_matrix(rng, rows, cols);
        let n = operator_norm(&g);
        if n > 1e-6 {
            return g.scale_real(1.0 / n);
        }
    }
}

/// Ratio of the target gauge to the operator norm, worst case.
fn target_factor(target: &DomainSpec) -> f64 {
    if target.kind == DomainKind::IV {
        std::f64::consts::SQRT_2
    } else {
        1.0
    }
}

fn into_class(target: &DomainSpec, map: HoloMap) -> HoloMap {
    match target.kind {
        DomainKind::II | DomainKind::III => HoloMap {
            source: map.source,
            target: *target,
            body: MapBody::Symmetrize {
                inner: Box::new(HoloMap { target: *target, ..map }),
                skew: target.kind == DomainKind::III,
            },
        },
        _ => map,
    }
}

fn e(rows: usize, cols: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols);
    m[(i, j)] = ONE;
    m
}

/// A unit-gauge target direction; half the time one with a flat profile.
fn target_direction(target: &DomainSpec, rng: &mut impl Rng) -> ComplexMatrix {
    let u = if rng.random_bool(0.5) {
        let profile = match target.kind {
            DomainKind::IV => vec![rng.random_range(0.0..=1.0)],
            _ => vec![1.0; target.profile_len()],
        };
        let base = profile_vector(target, &profile).expect("profile fits the domain");
        isotropy_element(target, rng.random())
            .apply(&base)
            .expect("isotropy maps are total")
    } else {
        target.gaussian(rng)
    };
    u.scale_real(1.0 / target.gauge(&u))
}

/// `Z ↦ ρ·Σ L_j Z R_j` with `Σ‖L_j‖‖R_j‖ = 1/factor`.
fn linear_family(source: &DomainSpec, target: &DomainSpec, rng: &mut impl Rng) -> impl Fn(f64) -> Result<HoloMap> {
    let terms_n = rng.random_range(1..=3);
    let f = target_factor(target);
    let mut terms = Vec::new();
    for _ in 0..terms_n {
        let l = contraction(rng, target.m, source.m);
        let r = contraction(rng, source.n, target.n);
        terms.push((l, r.scale_real(1.0 / (terms_n as f64 * f))));
    }
    let (s, t) = (*source, *target);
    move |rho| {
        let scaled = terms.iter().map(|(l, r)| (l.scale_real(rho), r.clone())).collect();
        Ok(into_class(&t, HoloMap::linear(s, t, scaled)?))
    }
}

/// `Z ↦ ρ·Z_ij·U` for a unit-gauge `U`.
fn broadcast_family(source: &DomainSpec, target: &DomainSpec, rng: &mut impl Rng) -> impl Fn(f64) -> Result<HoloMap> {
    let pairs = source.coordinate_pairs();
    let (i, j) = if rng.random_bool(0.5) {
        (0, 0)
    } else {
        pairs[rng.random_range(0..pairs.len())]
    };
    let u = target_direction(target, rng);
    let (s, t) = (*source, *target);
    move |rho| {
        let mut terms = Vec::new();
        for a in 0..t.m {
            for b in 0..t.n {
                if u[(a, b)] == C64::new(0.0, 0.0) {
                    continue;
                }
                let l = e(t.m, s.m, a, i).scale(u[(a, b)] * rho);
                terms.push((l, e(s.n, t.n, j, b)));
            }
        }
        HoloMap::linear(s, t, terms)
    }
}

/// `c₀ + ρ·L(Z + ZM₁Z + ZM₂ZM₃Z)R` with small `M`s and room left by `c₀`.
fn polynomial_family(source: &DomainSpec, target: &DomainSpec, rng: &mut impl Rng) -> impl Fn(f64) -> Result<HoloMap> {
    let (s, t) = (*source, *target);
    let c0 = t.sample_point_within(rng.random(), 0.5);
    let left = contraction(rng, t.m, s.m);
    let right = contraction(rng, s.n, t.n);
    let mut small = || contraction(rng, s.n, s.m).scale_real(0.2);
    let (m1, m2, m3) = (small(), small(), small());
    let bound = 1.0 + operator_norm(&m1) + operator_norm(&m2) * operator_norm(&m3);
    let base = 0.8 * (1.0 - t.gauge(&c0)) / (bound * target_factor(&t));
    move |rho| {
        let map = HoloMap {
            source: s,
            target: t,
            body: MapBody::Polynomial {
                c0: c0.clone(),
                left: left.clone(),
                right: right.clone(),
                m1: m1.clone(),
                m2: m2.clone(),
                m3: m3.clone(),
                scale: base * rho,
            },
        };
        Ok(into_class(&t, map))
    }
}

/// Canonical embedding when the source fits in the corner of the target:
/// row slices and `II ↪ I`, `III ↪ I` inclusions, or padding within a type.
pub fn embedding(source: &DomainSpec, target: &DomainSpec) -> Result<HoloMap> {
    let fits = source.m <= target.m && source.n <= target.n;
    let compatible = match (source.kind, target.kind) {
        (DomainKind::IV, DomainKind::IV) => true,
        (DomainKind::IV, _) | (_, DomainKind::IV) => false,
        (_, DomainKind::I) => true,
        (a, b) => a == b,
    };
    if !(fits && compatible) {
        return Err(structural(format!("no canonical embedding of {source} into {target}")));
    }
    let l = ComplexMatrix::from_fn(target.m, source.m, |i, j| if i == j { ONE } else { C64::new(0.0, 0.0) });
    let r = ComplexMatrix::from_fn(source.n, target.n, |i, j| if i == j { ONE } else { C64::new(0.0, 0.0) });
    HoloMap::linear(*source, *target, vec![(l, r)])
}

/// Shrinks `make(ρ)` from `ρ = 1` until the probes land inside.
fn contained(make: &dyn Fn(f64) -> Result<HoloMap>, probes: &[ComplexMatrix]) -> Option<HoloMap> {
    let mut rho = 1.0;
    for _ in 0..=MAX_HALVINGS {
        if let Ok(m) = make(rho) {
            if m.maps_probes_inside(probes) {
                return Some(m);
            }
        }
        rho *= 0.5;
    }
    None
}

/// Seeded corpus of holomorphic maps `source → target`, each checked on
/// `PROBES` source points. Base maps are wrapped by random automorphisms.
pub fn generate_maps(source: &DomainSpec, target: &DomainSpec, seed: u64, count: usize) -> Result<Vec<HoloMap>> {
    let probes: Vec<ComplexMatrix> = (0..PROBES)
        .map(|i| source.sample_point(derive_seed(seed, 31, i as u64)))
        .collect();
    let same = source == target;
    let embed = embedding(source, target).ok();
    let maps: Vec<Option<HoloMap>> = (0..count)
        .into_par_iter()
        .map(|i| -> Result<Option<HoloMap>> {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 32, i as u64));
            if i == 0 && same {
                return Ok(Some(HoloMap::identity(*source)));
            }
            let base: Option<HoloMap> = match i % 6 {
                0 if same => Some(HoloMap::identity(*source)),
                0 | 5 if embed.is_some() => embed.clone(),
                1 => Some(HoloMap::constant(*source, *target, target.sample_point(rng.random()))?),
                2 | 5 => contained(&linear_family(source, target, &mut rng), &probes),
                3 => contained(&broadcast_family(source, target, &mut rng), &probes),
                _ => contained(&polynomial_family(source, target, &mut rng), &probes),
            };
            let Some(base) = base else { return Ok(None) };
            let mut map = base;
            if i % 6 != 1 && rng.random_bool(0.7) {
                map = HoloMap::compose(map, random_automorphism(source, rng.random())?)?;
            }
            if rng.random_bool(0.7) {
                map = HoloMap::compose(random_automorphism(target, rng.random())?, map)?;
            }
            Ok(map.maps_probes_inside(&probes).then_some(map))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(maps.into_iter().flatten().collect())
}

/// `samples` points `(Z;V)` and their images under `f`. The first few are
/// coordinate directions at the origin.
pub fn pushforwards(f: &HoloMap, samples: usize, seed: u64) -> Result<Vec<Pushforward>> {
    let d = f.source;
    let basis = d.basis();
    let structured = basis.len().min(samples / 10);
    (0..samples)
        .map(|i| {
            let (z, v) = if i < structured {
                (d.zero(), basis[i].clone())
            } else {
                (
                    d.sample_point(derive_seed(seed, 33, i as u64)),
                    fibre_vector(&d, derive_seed(seed, 34, i as u64)),
                )
            };
            let fz = f.apply(&z)?;
            let fv = f.differential(&z, &v)?;
            Ok(Pushforward { z, v, fz, fv })
        })
        .collect()
}

struct Tally {
    min_margin: f64,
    sup_ratio: f64,
    violations: usize,
    worst: Option<SchwarzWitness>,
}

fn tally(label: &str, source: &MetricSpec, target: &MetricSpec, bound: f64, data: &[Pushforward]) -> Result<Tally> {
    let mut t = Tally {
        min_margin: f64::INFINITY,
        sup_ratio: 0.0,
        violations: 0,
        worst: None,
    };
    for p in data {
        let f1 = source.eval(&p.z, &p.v)?;
        let f2 = target.eval(&p.fz, &p.fv)?;
        let rel = (bound * f1 - f2) / f1;
        t.sup_ratio = t.sup_ratio.max(f2 / f1);
        if rel < -VIOLATION_TOL {
            t.violations += 1;
        }
        if rel < t.min_margin {
            t.min_margin = rel;
            t.worst = Some(SchwarzWitness {
                map: label.to_string(),
                z: p.z.clone(),
                v: p.v.clone(),
                f1,
                f2,
                margin: bound * f1 - f2,
            });
        }
    }
    Ok(t)
}

fn report(
    source: &MetricSpec,
    target: &MetricSpec,
    bound: f64,
    maps: usize,
    samples: usize,
    parts: Vec<Tally>,
) -> SchwarzReport {
    let mut out = SchwarzReport {
        source_metric: source.label(),
        target_metric: target.label(),
        bound,
        maps,
        samples,
        min_margin: f64::INFINITY,
        sup_ratio: 0.0,
        violations: 0,
        pass: true,
        witness: None,
    };
    let mut worst = None;
    for t in parts {
        out.sup_ratio = out.sup_ratio.max(t.sup_ratio);
        out.violations += t.violations;
        if t.min_margin < out.min_margin {
            out.min_margin = t.min_margin;
            worst = t.worst;
        }
    }
    out.pass = out.violations == 0;
    if !out.pass {
        out.witness = worst;
    }
    out
}

/// Margins of one map on `samples` seeded points.
pub fn schwarz_check(
    f: &HoloMap,
    source: &MetricSpec,
    target: &MetricSpec,
    bound: f64,
    samples: usize,
    seed: u64,
) -> Result<SchwarzReport> {
    check_domains(f, source, target)?;
    let data = pushforwards(f, samples, seed)?;
    let t = tally("map", source, target, bound, &data)?;
    Ok(report(source, target, bound, 1, samples, vec![t]))
}

fn check_domains(f: &HoloMap, source: &MetricSpec, target: &MetricSpec) -> Result<()> {
    if f.source != source.domain || f.target != target.domain {
        return Err(structural("map and metrics live on different domains"));
    }
    Ok(())
}

/// Pushforward data of a corpus, computed once and shared between metric
/// pairs.
pub struct Corpus {
    pub source: DomainSpec,
    pub target: DomainSpec,
    pub maps: Vec<HoloMap>,
    pub data: Vec<Vec<Pushforward>>,
}

impl Corpus {
    pub fn build(source: &DomainSpec, target: &DomainSpec, maps: usize, samples: usize, seed: u64) -> Result<Self> {
        let maps = generate_maps(source, target, seed, maps)?;
        let data = maps
            .par_iter()
            .enumerate()
            .map(|(i, f)| pushforwards(f, samples, derive_seed(seed, 35, i as u64)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            source: *source,
            target: *target,
            maps,
            data,
        })
    }

    pub fn check(&self, source: &MetricSpec, target: &MetricSpec, bound: f64) -> Result<SchwarzReport> {
        if self.source != source.domain || self.target != target.domain {
            return Err(structural("corpus and metrics live on different domains"));
        }
        let parts = self
            .data
            .par_iter()
            .enumerate()
            .map(|(i, data)| tally(&format!("corpus map #{i}"), source, target, bound, data))
            .collect::<Result<Vec<_>>>()?;
        let samples = self.data.iter().map(|d| d.len()).sum();
        Ok(report(source, target, bound, self.maps.len(), samples, parts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::curvature_bounds;

    #[test]
    fn identity_margin() {
        let d = DomainSpec::type_i(2, 2).unwrap();
        let m = MetricSpec::bergman(d);
        let c = curvature_bounds(&m).unwrap();
        let b = schwarz_bound(&c, &c);
        let r = schwarz_check(&HoloMap::identity(d), &m, &m, b, 30, 1).unwrap();
        assert!((r.min_margin - (b - 1.0)).abs() < 1e-12);
        assert!((r.sup_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_margin_is_bound() {
        let d = DomainSpec::type_ii(2).unwrap();
        let m = MetricSpec::bergman(d);
        let f = HoloMap::constant(d, d, d.sample_point(3)).unwrap();
        let r = schwarz_check(&f, &m, &m, 1.3, 20, 2).unwrap();
        assert!((r.min_margin - 1.3).abs() < 1e-12 && r.pass);
    }

    #[test]
    fn corpus_maps_stay_inside() {
        let pairs = [
            (DomainSpec::type_i(2, 2).unwrap(), DomainSpec::type_i(2, 2).unwrap()),
            (DomainSpec::type_ii(2).unwrap(), DomainSpec::type_i(2, 2).unwrap()),
            (DomainSpec::type_i(1, 2).unwrap(), DomainSpec::type_i(2, 2).unwrap()),
            (DomainSpec::type_iv(3).unwrap(), DomainSpec::type_iv(3).unwrap()),
            (DomainSpec::type_i(2, 2).unwrap(), DomainSpec::type_iii(4).unwrap()),
        ];
        for (s, t) in pairs {
            let maps = generate_maps(&s, &t, 9, 30).unwrap();
            assert!(maps.len() >= 25, "{s} -> {t}: {}", maps.len());
            let probes: Vec<_> = (0..50).map(|i| s.sample_point(1000 + i)).collect();
            assert!(maps.iter().all(|m| m.maps_probes_inside(&probes)));
        }
    }

    #[test]
    fn slice_is_isometric_at_origin() {
        let s = DomainSpec::type_i(1, 2).unwrap();
        let t = DomainSpec::type_i(2, 2).unwrap();
        let f = embedding(&s, &t).unwrap();
        let v = s.sample_tangent(1);
        let w = f.differential(&s.zero(), &v).unwrap();
        assert!((w.frobenius_norm() - v.frobenius_norm()).abs() < 1e-14);
        assert!(embedding(&t, &s).is_err());
    }

    #[test]
    fn small_corpus_has_no_violation() {
        let d = DomainSpec::type_i(2, 2).unwrap();
        let m = MetricSpec::bergman(d);
        let c = curvature_bounds(&m).unwrap();
        let corpus = Corpus::build(&d, &d, 40, 20, 3).unwrap();
        let r = corpus.check(&m, &m, schwarz_bound(&c, &c)).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.sup_ratio > 1.2);
    }
}
