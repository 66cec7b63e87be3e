//! Small numerical differentiation helpers.

use std::f64::consts::PI;

use crate::error::Result;
use crate::numkernel::{ComplexMatrix, C64};

/// Fourth-order central difference of a vector-valued function along a real
/// parameter.
pub fn central4(f: impl Fn(f64) -> Result<Vec<C64>>, h: f64) -> Result<Vec<C64>> {
    let p2 = f(2.0 * h)?;
    let p1 = f(h)?;
    let m1 = f(-h)?;
    let m2 = f(-2.0 * h)?;
    Ok((0..p1.len())
        .map(|i| (-p2[i] + p1[i] * 8.0 - m1[i] * 8.0 + m2[i]) / (12.0 * h))
        .collect())
}

/// Wirtinger derivative `∂/∂ζ` at 0 of `ζ ↦ f(ζ)`, from fourth-order
/// differences along the real and imaginary axes.
pub fn wirtinger(f: impl Fn(C64) -> Result<Vec<C64>>, h: f64) -> Result<Vec<C64>> {
    let dx = central4(|t| f(C64::new(t, 0.0)), h)?;
    let dy = central4(|t| f(C64::new(0.0, t)), h)?;
    Ok(dx
        .iter()
        .zip(&dy)
        .map(|(x, y)| (x - C64::new(0.0, 1.0) * y) * 0.5)
        .collect())
}

/// Derivative at 0 of a function holomorphic on a disc of radius larger than
/// `radius`, via the trapezoidal rule on the Cauchy integral with `points`
/// nodes.
pub fn contour_derivative(
    f: impl Fn(C64) -> Result<ComplexMatrix>,
    radius: f64,
    points: usize,
) -> Result<ComplexMatrix> {
    let mut acc: Option<ComplexMatrix> = None;
    for k in 0..points {
        let w = C64::from_polar(1.0, 2.0 * PI * k as f64 / points as f64);
        let val = f(w * radius)?.scale(w.conj());
        match acc.as_mut() {
            Some(a) => *a += &val,
            None => acc = Some(val),
        }
    }
    Ok(acc
        .expect("at least one contour node")
        .scale_real(1.0 / (points as f64 * radius)))
}

/// `lim_{ρ→0} (f(ρ) − f(0))/ρ²` for `f` smooth in `ρ²`, by Richardson
/// extrapolation over `levels` radii halving from `rho0`.
pub fn radial_second_coefficient(f: impl Fn(f64) -> Result<f64>, rho0: f64, levels: usize) -> Result<f64> {
    let f0 = f(0.0)?;
    let mut table: Vec<f64> = Vec::with_capacity(levels);
    let mut rho = rho0;
    for _ in 0..levels {
        table.push((f(rho)? - f0) / (rho * rho));
        rho *= 0.5;
    }
    // the expansion is in powers of ρ², and ρ² shrinks by 4 per level
    let mut factor = 4.0;
    for col in 1..levels {
        for i in (col..levels).rev() {
            table[i] = (factor * table[i] - table[i - 1]) / (factor - 1.0);
        }
        factor *= 4.0;
    }
    Ok(table[levels - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central4_on_cubic_is_exact() {
        let d = central4(|t| Ok(vec![C64::new(t * t * t + 2.0 * t, 0.0)]), 1e-2).unwrap();
        assert!((d[0].re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn wirtinger_of_modulus_squared() {
        // ∂/∂ζ |ζ + a|² at 0 is conj(a)
        let a = C64::new(0.3, -0.7);
        let d = wirtinger(|z| Ok(vec![C64::new((z + a).norm_sqr(), 0.0)]), 1e-3).unwrap();
        assert!((d[0] - a.conj()).norm() < 1e-10);
    }

    #[test]
    fn contour_derivative_of_exponential() {
        let d = contour_derivative(|z| Ok(ComplexMatrix::from_vec(1, 1, vec![(z + 0.2).exp()])), 0.1, 16).unwrap();
        assert!((d[(0, 0)] - C64::new(0.2, 0.0).exp()).norm() < 1e-14);
    }

    #[test]
    fn radial_coefficient_of_log() {
        // -ln(1 - ρ²) = ρ² + ρ⁴/2 + ...
        let c = radial_second_coefficient(|r| Ok(-(1.0 - r * r).ln()), 0.1, 6).unwrap();
        assert!((c - 1.0).abs() < 1e-10, "{c}");
    }
}
