use serde::Serialize;

use super::{nonlinear_connection, MetricSpec};
use crate::error::{domain, numeric, Result};
use crate::numkernel::{ComplexMatrix, C64, ZERO};

/// Speed drift beyond which the step is considered too coarse.
const MAX_DRIFT: f64 = 1e-3;

#[derive(Debug, Clone, Serialize)]
pub struct GeodesicPath {
    pub times: Vec<f64>,
    pub points: Vec<ComplexMatrix>,
    pub velocities: Vec<ComplexMatrix>,
    /// `F(σ(t); σ̇(t))` for the metric being tested.
    pub speeds: Vec<f64>,
    /// `max |F(σ;σ̇)/F(σ(0);σ̇(0)) − 1|`.
    pub drift: f64,
}

/// Integrate `σ̈^l = −Γ_{;i}^l(σ;σ̇) σ̇^i` for the Bergman connection with
/// classical RK4, recording the speed measured by `metric`.
pub fn geodesic(
    metric: &MetricSpec,
    z0: &ComplexMatrix,
    v: &ComplexMatrix,
    t_end: f64,
    steps: usize,
) -> Result<GeodesicPath> {
    let d = metric.domain;
    if steps == 0 || !(t_end.is_finite() && t_end > 0.0) {
        return Err(domain("geodesic needs T > 0 and at least one step"));
    }
    let speed0 = metric.eval(z0, v)?;
    if speed0 == 0.0 {
        return Err(domain("geodesic needs a nonzero initial velocity"));
    }
    let bergman = metric.bergman_companion();
    let accel = |x: &[C64], y: &[C64]| -> Result<Vec<C64>> {
        if y.iter().all(|c| *c == ZERO) {
            return Ok(vec![ZERO; y.len()]);
        }
        let g = nonlinear_connection(&bergman, &d.unpack(x), &d.unpack(y))?;
        Ok((0..y.len())
            .map(|l| -(0..y.len()).map(|i| g[(i, l)] * y[i]).sum::<C64>())
            .collect())
    };
    let axpy = |a: &[C64], s: f64, b: &[C64]| -> Vec<C64> { a.iter().zip(b).map(|(x, y)| x + y * s).collect() };

    let dt = t_end / steps as f64;
    let mut x = d.pack(z0);
    let mut y = d.pack(v);
    let mut path = GeodesicPath {
        times: vec![0.0],
        points: vec![z0.clone()],
        velocities: vec![v.clone()],
        speeds: vec![speed0],
        drift: 0.0,
    };
    for step in 1..=steps {
        let k1x = y.clone();
        let k1y = accel(&x, &y)?;
        let (x2, y2) = (axpy(&x, dt / 2.0, &k1x), axpy(&y, dt / 2.0, &k1y));
        let k2y = accel(&x2, &y2)?;
        let (x3, y3) = (axpy(&x, dt / 2.0, &y2), axpy(&y, dt / 2.0, &k2y));
        let k3y = accel(&x3, &y3)?;
        let (x4, y4) = (axpy(&x, dt, &y3), axpy(&y, dt, &k3y));
        let k4y = accel(&x4, &y4)?;
        for i in 0..x.len() {
            x[i] += (k1x[i] + y2[i] * 2.0 + y3[i] * 2.0 + y4[i]) * (dt / 6.0);
            y[i] += (k1y[i] + k2y[i] * 2.0 + k3y[i] * 2.0 + k4y[i]) * (dt / 6.0);
        }
        let z = d.unpack(&x);
        if !d.contains(&z)? {
            return Err(numeric(format!(
                "geodesic left the domain at step {step}; refine the step"
            )));
        }
        let w = d.unpack(&y);
        let speed = metric.eval(&z, &w)?;
        path.drift = path.drift.max((speed / speed0 - 1.0).abs());
        if path.drift > MAX_DRIFT {
            return Err(numeric(format!(
                "speed drift {:.3e} at step {step}; refine the step",
                path.drift
            )));
        }
        path.times.push(step as f64 * dt);
        path.points.push(z);
        path.velocities.push(w);
        path.speeds.push(speed);
    }
    Ok(path)
}
