//! Discrete residual of an analytic solution in the layered equations.
//!
//! The solution is sampled on the grid plus a two-node halo, so every
//! stencil is central and no boundary closure is involved.

use std::fmt;

use crate::error::{Error, Result};
use crate::fields::{GridSpec, Topology};

use super::ModelParams;

/// A closed-form solution that can be evaluated pointwise.
pub trait ExactSolution {
    fn name(&self) -> String;

    /// `(ψ¹, ψ²)` at `(t, x, y)`.
    fn eval(&self, t: f64, x: f64, y: f64) -> Result<(f64, f64)>;
}

impl<S: ExactSolution + ?Sized> ExactSolution for &S {
    fn name(&self) -> String {
        (**self).name()
    }

    fn eval(&self, t: f64, x: f64, y: f64) -> Result<(f64, f64)> {
        (**self).eval(t, x, y)
    }
}

impl<S: ExactSolution + ?Sized> ExactSolution for Box<S> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn eval(&self, t: f64, x: f64, y: f64) -> Result<(f64, f64)> {
        (**self).eval(t, x, y)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub name: String,
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub dt: f64,
    pub max: f64,
    pub l2: f64,
    /// Largest magnitude among the individual terms `Q_t` and `{ψ, Q}`.
    pub scale: f64,
    /// Estimated rounding error of the residual.
    pub noise: f64,
}

impl fmt::Display for Residual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "solution={} grid={}x{} h={:.16e} dt={:.16e} max_res={:.16e} l2_res={:.16e}",
            self.name, self.nx, self.ny, self.h, self.dt, self.max, self.l2
        )
    }
}

const HALO: usize = 2;

struct Sampled {
    ex: usize,
    ey: usize,
    psi: [Vec<f64>; 2],
}

fn sample(
    sol: &dyn ExactSolution,
    grid: &GridSpec,
    origin: (f64, f64),
    t: f64,
) -> Result<Sampled> {
    let (ex, ey) = (grid.mx() + 2 * HALO, grid.my() + 2 * HALO);
    let mut a = Vec::with_capacity(ex * ey);
    let mut b = Vec::with_capacity(ex * ey);
    for j in 0..ey {
        let y = origin.1 + (j as f64 - HALO as f64) * grid.hy();
        for i in 0..ex {
            let x = origin.0 + (i as f64 - HALO as f64) * grid.hx();
            let (p1, p2) = sol.eval(t, x, y)?;
            if !(p1.is_finite() && p2.is_finite()) {
                return Err(Error::Singular(format!(
                    "{} is not finite at t={t}, x={x}, y={y}",
                    sol.name()
                )));
            }
            a.push(p1);
            b.push(p2);
        }
    }
    Ok(Sampled { ex, ey, psi: [a, b] })
}

/// Potential vorticities on the sampled array, valid one node in from the
/// edge, with the sums of absolute values of their terms.
fn pv(s: &Sampled, grid: &GridSpec, origin_y: f64, p: &ModelParams) -> ([Vec<f64>; 2], [Vec<f64>; 2]) {
    let (hx2, hy2) = (grid.hx() * grid.hx(), grid.hy() * grid.hy());
    let n = s.ex * s.ey;
    let mut out = [vec![0.0; n], vec![0.0; n]];
    let mut mag = [vec![0.0; n], vec![0.0; n]];
    for j in 1..s.ey - 1 {
        let y = origin_y + (j as f64 - HALO as f64) * grid.hy();
        for i in 1..s.ex - 1 {
            let k = j * s.ex + i;
            let diff = s.psi[0][k] - s.psi[1][k];
            let diff_abs = s.psi[0][k].abs() + s.psi[1][k].abs();
            for (layer, sign) in [(0, -1.0), (1, 1.0)] {
                let v = &s.psi[layer];
                let lap = (v[k - 1] - 2.0 * v[k] + v[k + 1]) / hx2
                    + (v[k - s.ex] - 2.0 * v[k] + v[k + s.ex]) / hy2;
                out[layer][k] = lap + p.beta * y + sign * p.froude * diff;
                mag[layer][k] = (v[k - 1].abs() + 2.0 * v[k].abs() + v[k + 1].abs()) / hx2
                    + (v[k - s.ex].abs() + 2.0 * v[k].abs() + v[k + s.ex].abs()) / hy2
                    + (p.beta * y).abs()
                    + p.froude * diff_abs;
            }
        }
    }
    (out, mag)
}

/// Residual on `grid` with nodes offset by `origin`.
pub fn pde_residual_at(
    sol: &dyn ExactSolution,
    p: &ModelParams,
    grid: &GridSpec,
    origin: (f64, f64),
    t: f64,
    dt: f64,
) -> Result<Residual> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::branch("dt > 0", format!("dt = {dt}")));
    }
    let before = sample(sol, grid, origin, t - dt)?;
    let now = sample(sol, grid, origin, t)?;
    let after = sample(sol, grid, origin, t + dt)?;
    let (q_before, m_before) = pv(&before, grid, origin.1, p);
    let (q_now, m_now) = pv(&now, grid, origin.1, p);
    let (q_after, m_after) = pv(&after, grid, origin.1, p);

    let (ex, hx, hy) = (now.ex, grid.hx(), grid.hy());
    let walls_y = !grid.topology.y_periodic();
    let walls_x = grid.topology == Topology::Rectangle;
    let (mut max, mut sum2, mut scale, mut count) = (0.0f64, 0.0, 0.0f64, 0usize);
    let mut noise = 0.0f64;
    for j in 0..grid.my() {
        if walls_y && (j == 0 || j == grid.ny) {
            continue;
        }
        for i in 0..grid.mx() {
            if walls_x && (i == 0 || i == grid.nx) {
                continue;
            }
            let k = (j + HALO) * ex + i + HALO;
            for layer in 0..2 {
                let psi = &now.psi[layer];
                let q = &q_now[layer];
                let qt = (q_after[layer][k] - q_before[layer][k]) / (2.0 * dt);
                let psi_x = (psi[k + 1] - psi[k - 1]) / (2.0 * hx);
                let psi_y = (psi[k + ex] - psi[k - ex]) / (2.0 * hy);
                let q_x = (q[k + 1] - q[k - 1]) / (2.0 * hx);
                let q_y = (q[k + ex] - q[k - ex]) / (2.0 * hy);
                let bracket = psi_x * q_y - psi_y * q_x;
                let r = qt + bracket;
                // rounding error bound: every term taken with its absolute value
                let m = &m_now[layer];
                let qt_m = (m_after[layer][k] + m_before[layer][k]) / (2.0 * dt);
                let psi_m = |a: usize, b: usize, h: f64| (psi[a].abs() + psi[b].abs()) / (2.0 * h);
                let q_m = |a: usize, b: usize, h: f64| (m[a] + m[b]) / (2.0 * h);
                let bracket_m = psi_m(k + 1, k - 1, hx) * q_m(k + ex, k - ex, hy)
                    + psi_m(k + ex, k - ex, hy) * q_m(k + 1, k - 1, hx);
                noise = noise.max(f64::EPSILON * (qt_m + bracket_m));
                max = max.max(r.abs());
                scale = scale.max(qt.abs()).max(bracket.abs());
                sum2 += r * r;
                count += 1;
            }
        }
    }
    Ok(Residual {
        name: sol.name(),
        nx: grid.nx,
        ny: grid.ny,
        h: hx.max(hy),
        dt,
        max,
        l2: (sum2 / count.max(1) as f64).sqrt(),
        scale,
        noise,
    })
}

/// Residual on `grid` with its usual origin at `(0, 0)`.
pub fn pde_residual(
    sol: &dyn ExactSolution,
    p: &ModelParams,
    grid: &GridSpec,
    t: f64,
    dt: f64,
) -> Result<Residual> {
    pde_residual_at(sol, p, grid, (0.0, 0.0), t, dt)
}

/// Required reduction factor when `h` and `dt` are halved.
pub const CONVERGENCE_RATIO: f64 = 3.5;

/// Residuals below this multiple of the rounding estimate count as round-off.
pub const ROUNDOFF_FLOOR: f64 = 16.0;

#[derive(Clone, Debug, PartialEq)]
pub struct Convergence {
    pub coarse: Residual,
    pub fine: Residual,
    pub ratio: f64,
    /// Both residuals sit at round-off level; the discretization is exact.
    pub exact: bool,
    pub passed: bool,
}

fn at_floor(r: &Residual) -> bool {
    r.max <= ROUNDOFF_FLOOR * r.noise
}

/// Residuals on `grid` with `dt`, then on the refined grid with `dt / 2`.
pub fn residual_convergence(
    sol: &dyn ExactSolution,
    p: &ModelParams,
    grid: &GridSpec,
    origin: (f64, f64),
    t: f64,
    dt: f64,
) -> Result<Convergence> {
    let coarse = pde_residual_at(sol, p, grid, origin, t, dt)?;
    let fine = pde_residual_at(sol, p, &grid.refined(), origin, t, 0.5 * dt)?;
    let ratio = coarse.max / fine.max;
    let exact = at_floor(&coarse) && at_floor(&fine);
    let passed = exact || ratio >= CONVERGENCE_RATIO;
    Ok(Convergence { coarse, fine, ratio, exact, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Closure<F>(&'static str, F);

    impl<F: Fn(f64, f64, f64) -> (f64, f64)> ExactSolution for Closure<F> {
        fn name(&self) -> String {
            self.0.to_string()
        }
        fn eval(&self, t: f64, x: f64, y: f64) -> Result<(f64, f64)> {
            Ok((self.1)(t, x, y))
        }
    }

    fn grid(n: usize) -> GridSpec {
        GridSpec::periodic(n, n, 2.0, 2.0).unwrap()
    }

    #[test]
    fn zero_solution_has_zero_residual() {
        let z = Closure("zero", |_, _, _| (0.0, 0.0));
        let r = pde_residual(&z, &ModelParams::default(), &grid(16), 0.0, 0.1).unwrap();
        assert_eq!(r.max, 0.0);
        assert_eq!(r.l2, 0.0);
    }

    #[test]
    fn constant_wind_is_exact() {
        // ψ¹ = 2p, ψ² = −2p with p = x − νy, κ = F = β = 1
        let nu = 0.3;
        let s = Closure("wind", move |t, x, y| {
            let p = x - nu * y;
            (2.0 * p + t, -2.0 * p - t)
        });
        let c = residual_convergence(&s, &ModelParams::default(), &grid(16), (0.0, 0.0), 0.2, 0.05)
            .unwrap();
        assert!(c.exact && c.passed, "{c:?}");
    }

    #[test]
    fn non_solution_is_not_small() {
        let s = Closure("bogus", |t: f64, x: f64, _| ((x + t).sin(), 0.0));
        let r = pde_residual(&s, &ModelParams::default(), &grid(32), 0.0, 0.01).unwrap();
        assert!(r.max > 0.1);
    }

    #[test]
    fn singular_samples_are_reported() {
        let s = Closure("log", |_, x: f64, _| ((x - 1.0).ln(), 0.0));
        let e = pde_residual(&s, &ModelParams::default(), &grid(16), 0.0, 0.1).unwrap_err();
        assert!(matches!(e, Error::Singular(_)));
    }

    #[test]
    fn record_layout() {
        let r = Residual {
            name: "w".into(),
            nx: 16,
            ny: 8,
            h: 0.5,
            dt: 0.25,
            max: 1e-3,
            l2: 2e-4,
            scale: 1.0,
            noise: 0.0,
        };
        assert_eq!(
            r.to_string(),
            "solution=w grid=16x8 h=5.0000000000000000e-1 dt=2.5000000000000000e-1 \
             max_res=1.0000000000000000e-3 l2_res=2.0000000000000001e-4"
        );
    }
}
