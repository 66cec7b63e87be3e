//! Extremization over the probability simplex and the unit interval: a dense
//! grid followed by a local golden-section polish.

use rayon::prelude::*;
use serde::Serialize;

const GOLDEN: f64 = 0.618_033_988_749_894_8;
const POLISH_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 60;
const POLISH_STARTS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extremum {
    pub value: f64,
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extrema {
    pub min: Extremum,
    pub max: Extremum,
}

/// Grid resolution per axis for a simplex of `dim` weights.
pub fn default_resolution(dim: usize) -> usize {
    if dim <= 2 {
        200
    } else {
        60
    }
}

/// All points of the simplex `{μ ≥ 0, Σμ = 1}` with coordinates in
/// `{0, 1/res, …, 1}`, vertices and barycentric lattice points included.
pub fn simplex_grid(dim: usize, res: usize) -> Vec<Vec<f64>> {
    fn rec(dim: usize, left: usize, res: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if cur.len() + 1 == dim {
            cur.push(left);
            out.push(cur.iter().map(|&k| k as f64 / res as f64).collect());
            cur.pop();
            return;
        }
        for k in (0..=left).rev() {
            cur.push(k);
            rec(dim, left - k, res, cur, out);
            cur.pop();
        }
    }
    assert!(dim >= 1, "simplex needs at least one weight");
    let mut out = Vec::new();
    rec(dim, res, res, &mut Vec::with_capacity(dim), &mut out);
    out
}

/// Minimizer of a 1-D function on `[lo, hi]` by golden-section search.
pub fn golden_section(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2);
        }
    }
    // endpoints are candidates too, extreme values often sit on a face
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    for x in [lo, hi] {
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

fn polish_simplex(f: &(dyn Fn(&[f64]) -> f64 + Sync), start: &[f64], radius: f64) -> (Vec<f64>, f64) {
    let dim = start.len();
    let mut x = start.to_vec();
    let mut fx = f(&x);
    for _ in 0..MAX_SWEEPS {
        let before = fx;
        for i in 0..dim {
            for j in (i + 1)..dim {
                // move mass t from j to i
                let lo = (-x[i]).max(-radius);
                let hi = x[j].min(radius);
                if hi - lo <= 0.0 {
                    continue;
                }
                let base = x.clone();
                let line = |t: f64| {
                    let mut y = base.clone();
                    y[i] = (base[i] + t).max(0.0);
                    y[j] = (base[j] - t).max(0.0);
                    f(&y)
                };
                let (t, ft) = golden_section(line, lo, hi, POLISH_TOL);
                if ft < fx {
                    x[i] = (base[i] + t).max(0.0);
                    x[j] = (base[j] - t).max(0.0);
                    fx = ft;
                }
            }
        }
        if before - fx <= 1e-15 * before.abs().max(1.0) {
            break;
        }
    }
    (x, fx)
}

fn minimize_simplex(f: &(dyn Fn(&[f64]) -> f64 + Sync), grid: &[Vec<f64>], values: &[f64], radius: f64) -> Extremum {
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut best = Extremum {
        value: values[order[0]],
        point: grid[order[0]].clone(),
    };
    for &idx in order.iter().take(POLISH_STARTS) {
        let (p, v) = polish_simplex(f, &grid[idx], radius);
        if v < best.value {
            best = Extremum { value: v, point: p };
        }
    }
    best
}

/// Minimum and maximum of `f` over the simplex of `dim` weights.
pub fn optimize_simplex(dim: usize, res: usize, f: &(dyn Fn(&[f64]) -> f64 + Sync)) -> Extrema {
    let grid = simplex_grid(dim, res);
    let values: Vec<f64> = grid.par_iter().map(|p| f(p)).collect();
    let radius = 2.0 / res as f64;
    let min = minimize_simplex(f, &grid, &values, radius);
    let neg = |p: &[f64]| -f(p);
    let neg_values: Vec<f64> = values.iter().map(|v| -v).collect();
    let mut max = minimize_simplex(&neg, &grid, &neg_values, radius);
    max.value = -max.value;
    Extrema { min, max }
}

/// Minimum and maximum of `f` on `[0, 1]` from `points + 1` grid nodes and a
/// local polish.
pub fn optimize_interval(points: usize, f: &(dyn Fn(f64) -> f64 + Sync)) -> Extrema {
    let nodes: Vec<f64> = (0..=points).map(|i| i as f64 / points as f64).collect();
    let values: Vec<f64> = nodes.par_iter().map(|&s| f(s)).collect();
    let h = 1.0 / points as f64;
    let refine = |sign: f64| -> Extremum {
        let mut best = 0;
        for i in 1..nodes.len() {
            if sign * values[i] < sign * values[best] {
                best = i;
            }
        }
        let s = nodes[best];
        let (x, v) = golden_section(|x| sign * f(x), (s - h).max(0.0), (s + h).min(1.0), 1e-13);
        if v < sign * values[best] {
            Extremum {
                value: sign * v,
                point: vec![x],
            }
        } else {
            Extremum {
                value: values[best],
                point: vec![s],
            }
        }
    };
    Extrema {
        min: refine(1.0),
        max: refine(-1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_size_and_vertices() {
        let g = simplex_grid(3, 4);
        assert_eq!(g.len(), 15);
        assert!(g.contains(&vec![1.0, 0.0, 0.0]));
        assert!(g.iter().all(|p| (p.iter().sum::<f64>() - 1.0).abs() < 1e-14));
        assert_eq!(simplex_grid(1, 10), vec![vec![1.0]]);
    }

    #[test]
    fn finds_interior_and_vertex_extremes() {
        // Σμ² is smallest at the barycentre and largest at a vertex
        let f = |p: &[f64]| p.iter().map(|x| x * x).sum::<f64>();
        let e = optimize_simplex(3, 60, &f);
        assert!((e.min.value - 1.0 / 3.0).abs() < 1e-12);
        assert!((e.max.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn polish_beats_grid_off_lattice() {
        let f = |p: &[f64]| (p[0] - 0.123_456_7).powi(2);
        let e = optimize_simplex(2, 20, &f);
        assert!(e.min.value < 1e-20);
        assert!((e.min.point[0] - 0.123_456_7).abs() < 1e-9);
    }

    #[test]
    fn interval_optimum() {
        let e = optimize_interval(1000, &|s: f64| (s - 0.3141).powi(2));
        assert!((e.min.point[0] - 0.3141).abs() < 1e-7);
        assert_eq!(e.max.point[0], 1.0);
    }
}
