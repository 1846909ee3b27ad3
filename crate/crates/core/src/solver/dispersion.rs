use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fields::Field2D;

/// Argument of the projection of `f` onto `e^{i(kx·x + ky·y)}`.
pub fn phase_of(f: &Field2D, kx: f64, ky: f64) -> f64 {
    let g = f.grid();
    let (mut re, mut im) = (0.0, 0.0);
    for j in 0..g.my() {
        for i in 0..g.mx() {
            let theta = kx * g.x(i) + ky * g.y(j);
            let v = f.at(i, j) * g.weight(i, j);
            re += v * theta.cos();
            im -= v * theta.sin();
        }
    }
    im.atan2(re)
}

/// Zonal phase speed of the `(kx, ky)` component from time-stamped
/// snapshots: least-squares slope of the unwrapped phase, divided by `−kx`.
pub fn fit_phase_speed(samples: &[(f64, Field2D)], kx: f64, ky: f64) -> Result<f64> {
    if samples.len() < 2 || kx == 0.0 {
        return Err(Error::branch("two snapshots and kx != 0", format!("{} snapshots, kx = {kx}", samples.len())));
    }
    let mut phases = Vec::with_capacity(samples.len());
    let mut last = 0.0;
    let mut offset = 0.0;
    for (n, (_, f)) in samples.iter().enumerate() {
        let p = phase_of(f, kx, ky);
        if n > 0 {
            let jump = p - last;
            if jump > PI {
                offset -= 2.0 * PI;
            } else if jump < -PI {
                offset += 2.0 * PI;
            }
        }
        last = p;
        phases.push(p + offset);
    }
    let n = samples.len() as f64;
    let tm = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let pm = phases.iter().sum::<f64>() / n;
    let (mut num, mut den) = (0.0, 0.0);
    for ((t, _), p) in samples.iter().zip(&phases) {
        num += (t - tm) * (p - pm);
        den += (t - tm) * (t - tm);
    }
    if den == 0.0 {
        return Err(Error::Singular("snapshots share one time".into()));
    }
    Ok(-(num / den) / kx)
}
