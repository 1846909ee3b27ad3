//! The `λ = −2` scaling reduction `r v''' + (β − 2ϰF r) v' = 0`.
//!
//! `u = v'` solves `r u'' + (β − 2ϰF r) u = 0`, which becomes Whittaker's
//! equation with indices `(β/√(8ϰF), 1/2)` in the variable `√(8ϰF) r`. The
//! profile is produced from the power series at the origin and continued by
//! RK4.

use crate::error::{Error, Result};

use super::ode::rk4;

/// `(m, n)` of the Whittaker functions for `β` and `ϰF`.
pub fn whittaker_indices(beta: f64, kappa_f: f64) -> (f64, f64) {
    (beta / (8.0 * kappa_f).sqrt(), 0.5)
}

/// Coefficients of the solution `u = r + …` regular at the origin.
fn coefficients(beta: f64, kappa_f: f64, terms: usize) -> Vec<f64> {
    let mut a = vec![0.0, 1.0];
    for n in 2..terms {
        let v = (2.0 * kappa_f * a[n - 2] - beta * a[n - 1]) / (n * (n - 1)) as f64;
        a.push(v);
    }
    a
}

/// `(v, v', v'')` with `v(0) = 0` and `v' = u = r + …`, by the power series.
pub fn whittaker_series(beta: f64, kappa_f: f64, r: f64) -> (f64, f64, f64) {
    let a = coefficients(beta, kappa_f, 120);
    let (mut v, mut u, mut du) = (0.0, 0.0, 0.0);
    for (n, c) in a.iter().enumerate() {
        v += c * r.powi(n as i32 + 1) / (n + 1) as f64;
        u += c * r.powi(n as i32);
        if n > 0 {
            du += c * n as f64 * r.powi(n as i32 - 1);
        }
    }
    (v, u, du)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WhittakerPoint {
    pub r: f64,
    pub v: f64,
    pub dv: f64,
    pub ddv: f64,
}

/// Integrates the reduced equation from `r0 > 0` to `r1` starting from the
/// series values at `r0`.
pub fn whittaker_profile(beta: f64, kappa_f: f64, r0: f64, r1: f64, steps: usize) -> Result<Vec<WhittakerPoint>> {
    if !(r0 > 0.0 && r1 > r0) {
        return Err(Error::branch("0 < r0 < r1", format!("r0 = {r0}, r1 = {r1}")));
    }
    let (v, u, du) = whittaker_series(beta, kappa_f, r0);
    let states = rk4(vec![v, u, du], r0, r1, steps.max(1), |r, y| {
        vec![y[1], y[2], -(beta - 2.0 * kappa_f * r) * y[1] / r]
    });
    let h = (r1 - r0) / steps.max(1) as f64;
    Ok(states
        .into_iter()
        .enumerate()
        .map(|(i, y)| WhittakerPoint { r: r0 + i as f64 * h, v: y[0], dv: y[1], ddv: y[2] })
        .collect())
}
