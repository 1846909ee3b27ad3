//! Solutions invariant under two-dimensional subalgebras.

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::transforms::TimeFn;

use super::params::Resolved;
use super::solution::{guard, Solution};
use super::special::e1_scaled;

const SAME: f64 = 1e-12;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= SAME * a.abs().max(b.abs()).max(1.0)
}

/// Background of the stationary reduction: `κt + (μ ± ρ) y` in each layer.
fn a21_layers(
    name: &str,
    kappa: f64,
    nu: f64,
    mu: f64,
    rho: f64,
    v: impl Fn(f64) -> (f64, f64) + Send + Sync + 'static,
) -> Solution {
    Solution::layered(name, move |t, x, y| {
        let (v1, v2) = v(x - nu * y);
        Ok((v1 + kappa * t + (mu + rho) * y, v2 - kappa * t + (mu - rho) * y))
    })
}

/// `ρ = μ = 0`: uniform wind in both layers.
pub(crate) fn a21_constant_wind(p: &Resolved, m: &ModelParams) -> Result<Solution> {
    let (kappa, nu) = (p.real("kappa")?, p.real("nu")?);
    let (c1, c2) = (p.real("c1")?, p.real("c2")?);
    let slope = 2.0 * m.froude * kappa / m.beta;
    Ok(a21_layers("a21_constant_wind", kappa, nu, 0.0, 0.0, move |q| {
        (slope * q + c1, -slope * q + c2)
    }))
}

/// Which layer carries the third-order profile when `ρ = ±μ`.
fn semi_coupled_layer(p: &Resolved) -> Result<(f64, f64, bool)> {
    let (mu, rho) = (p.real("mu")?, p.real("rho")?);
    let upper = if close(rho, mu) {
        true
    } else if close(rho, -mu) {
        false
    } else {
        return Err(Error::branch("rho = mu or rho = -mu", format!("rho = {rho}, mu = {mu}")));
    };
    Ok((mu, rho, upper))
}

/// `ρ = ±μ`, `μ > 0`: exponential profile in one layer.
pub(crate) fn a21_exponential(p: &Resolved, m: &ModelParams) -> Result<Solution> {
    let (mu, rho, upper) = semi_coupled_layer(p)?;
    if !(mu > 0.0) {
        return Err(Error::branch("mu > 0", format!("mu = {mu}")));
    }
    let (kappa, nu) = (p.real("kappa")?, p.real("nu")?);
    let c: Vec<f64> = ["c1", "c2", "c3", "c4"].iter().map(|n| p.real(n)).collect::<Result<_>>()?;
    let s = (m.beta / (2.0 * mu * (1.0 + nu * nu))).sqrt();
    let lin = 2.0 * m.froude * kappa / (2.0 * m.froude * mu + m.beta);
    Ok(a21_layers("a21_exponential", kappa, nu, mu, rho, move |q| {
        let wave = c[0] * (s * q).exp() + c[1] * (-s * q).exp();
        if upper {
            (wave + lin * q + c[2], -lin * q + c[3])
        } else {
            (lin * q + c[2], wave - lin * q + c[3])
        }
    }))
}

/// `ρ = ±μ`, `μ < 0`: stationary wave in one layer over uniform flow.
pub(crate) fn a21_stationary_wave(p: &Resolved, m: &ModelParams) -> Result<Solution> {
    let (mu, rho, upper) = semi_coupled_layer(p)?;
    if !(mu < 0.0) {
        return Err(Error::branch("mu < 0", format!("mu = {mu}")));
    }
    let (kappa, nu) = (p.real("kappa")?, p.real("nu")?);
    let c: Vec<f64> = ["c1", "c2", "c3", "c4"].iter().map(|n| p.real(n)).collect::<Result<_>>()?;
    let s = (m.beta / (2.0 * mu.abs() * (1.0 + nu * nu))).sqrt();
    let den = 2.0 * m.froude * mu.abs() - m.beta;
    guard(den, 2.0 * m.froude * mu.abs() + m.beta, "2F|mu| - beta")?;
    let lin = 2.0 * m.froude * kappa / den;
    Ok(a21_layers("a21_stationary_wave", kappa, nu, mu, rho, move |q| {
        let wave = c[0] * (s * q).cos() + c[1] * (s * q).sin();
        if upper {
            (wave - lin * q + c[2], lin * q + c[3])
        } else {
            (-lin * q + c[2], wave + lin * q + c[3])
        }
    }))
}

type Mat4 = [[f64; 4]; 4];

fn matmul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut c = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

/// Matrix exponential by scaling and squaring of a Taylor series.
fn expm(a: &Mat4) -> Mat4 {
    let norm = a.iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let s = 0.5f64.powi(squarings);
    let mut term = [[0.0; 4]; 4];
    let mut sum = [[0.0; 4]; 4];
    for i in 0..4 {
        term[i][i] = 1.0;
        sum[i][i] = 1.0;
    }
    let scaled: Mat4 = a.map(|r| r.map(|v| v * s));
    for k in 1..24 {
        term = matmul(&term, &scaled).map(|r| r.map(|v| v / k as f64));
        for i in 0..4 {
            for j in 0..4 {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        sum = matmul(&sum, &sum);
    }
    sum
}

/// Nonsingular `ρ ≠ ±μ`: the once-integrated constant-coefficient system
/// solved through the matrix exponential of its first-order form.
pub(crate) fn a21_general(p: &Resolved, m: &ModelParams) -> Result<Solution> {
    let (kappa, nu, mu, rho) = (p.real("kappa")?, p.real("nu")?, p.real("mu")?, p.real("rho")?);
    if close(rho, mu) || close(rho, -mu) {
        return Err(Error::branch("rho != ±mu", format!("rho = {rho}, mu = {mu}")));
    }
    let (fr, beta) = (m.froude, m.beta);
    guard(2.0 * fr * mu + beta, 2.0 * fr * mu.abs() + beta, "2F mu + beta")?;
    let n = 1.0 + nu * nu;
    let diag = [-(rho + mu) * n, (rho - mu) * n];
    // diag·v'' + K v + e q = 0
    let k = [[fr * (mu - rho) + beta, -fr * (mu + rho)], [fr * (rho - mu), fr * (mu + rho) + beta]];
    let e = [-2.0 * fr * kappa, 2.0 * fr * kappa];
    let det = k[0][0] * k[1][1] - k[0][1] * k[1][0];
    let slope = [
        -(k[1][1] * e[0] - k[0][1] * e[1]) / det,
        -(-k[1][0] * e[0] + k[0][0] * e[1]) / det,
    ];
    let mut gen = [[0.0; 4]; 4];
    gen[0][2] = 1.0;
    gen[1][3] = 1.0;
    for i in 0..2 {
        for j in 0..2 {
            gen[2 + i][j] = -k[i][j] / diag[i];
        }
    }
    let init = [
        p.real("v1")?,
        p.real("v2")?,
        p.real("dv1")? - slope[0],
        p.real("dv2")? - slope[1],
    ];
    Ok(a21_layers("a21_general", kappa, nu, mu, rho, move |q| {
        let flow = expm(&gen.map(|r| r.map(|v| v * q)));
        let z: Vec<f64> = (0..2).map(|i| (0..4).map(|j| flow[i][j] * init[j]).sum()).collect();
        (z[0] + slope[0] * q, z[1] + slope[1] * q)
    }))
}

/// Profile in `p = y − νt` involving `ln(ν + σp)` and exponential integrals.
pub(crate) fn a22_exponential_integral(p: &Resolved, m: &ModelParams) -> Result<Solution> {
    let (nu, sigma, kappa) = (p.real("nu")?, p.real("sigma")?, p.real("kappa")?);
    if sigma == 0.0 {
        return Err(Error::branch("sigma != 0", "sigma = 0"));
    }
    let c: Vec<f64> = ["c1", "c2", "c3", "c4", "c5", "c6"].iter().map(|n| p.real(n)).collect::<Result<_>>()?;
    let (beta, root) = (m.beta, (2.0 * m.froude).sqrt());
    let a = root / sigma;
    let r = nu / sigma;
    Ok(Solution::barotropic("a22_exponential_integral", move |t, x, y| {
        let q = y - nu * t;
        let z = nu + sigma * q;
        if !(z > 0.0) {
            return Err(Error::Singular(format!("nu + sigma*p = {z:e} <= 0")));
        }
        let lz = z.ln();
        let v1 = r * beta * lz * (q * q + 2.0 * r * q + r * r)
            - beta / 3.0 * (q.powi(3) + 4.5 * r * q * q + 6.0 * r * r * q + 1.5 * r.powi(3))
            + c[0] * q * q
            + c[1] * q
            + c[2];
        let v2 = kappa / sigma * (2.0 * lz + e1_scaled(a * z) + e1_scaled(-a * z))
            + c[3] * (root * q).exp()
            + c[4] * (-root * q).exp()
            + c[5];
        Ok((v1 - 2.0 * sigma * q * x, v2 + 2.0 * kappa * t))
    }))
}

struct A23 {
    gamma1: f64,
    gamma2: f64,
    delta: [f64; 4],
}

fn a23_coefficients(p: &Resolved, m: &ModelParams) -> Result<(A23, [f64; 5])> {
    let (nu, mu, kappa, rho) = (p.real("nu")?, p.real("mu")?, p.real("kappa")?, p.real("rho")?);
    if rho == 0.0 {
        return Err(Error::branch("rho != 0", "rho = 0"));
    }
    let (c1, c2, c3, c4) = (p.real("c1")?, p.real("c2")?, p.real("c3")?, p.real("c4")?);
    let (fr, beta) = (m.froude, m.beta);
    let d = nu - mu;
    let gamma2 = -2.0 * fr * (d * d / rho + rho);
    let gamma1 = d * d / rho - rho;
    guard(gamma1, d * d / rho.abs() + rho.abs(), "gamma1")?;
    guard(gamma2, 2.0 * fr * (d * d / rho.abs() + rho.abs()), "gamma2")?;
    let delta = [
        2.0 * (c1 - c3 * fr) / rho * d + c4,
        -2.0 * ((beta * mu + c2 * fr) / rho * d - (2.0 * fr * kappa - beta * rho)),
        -2.0 * c1 * fr / rho * d,
        2.0 * fr * beta * mu / (3.0 * rho) * d,
    ];
    Ok((A23 { gamma1, gamma2, delta }, [nu, mu, kappa, rho, 0.0]))
}

fn a23_solution(
    name: &'static str,
    p: &Resolved,
    m: &ModelParams,
    trig: bool,
) -> Result<Solution> {
    let (co, [nu, mu, kappa, rho, _]) = a23_coefficients(p, m)?;
    let ratio = co.gamma2 / co.gamma1;
    if trig && !(ratio > 0.0) {
        return Err(Error::branch("gamma2/gamma1 > 0", format!("gamma2/gamma1 = {ratio}")));
    }
    if !trig && !(ratio < 0.0) {
        return Err(Error::branch("gamma2/gamma1 < 0", format!("gamma2/gamma1 = {ratio}")));
    }
    let w = ratio.abs().sqrt();
    let (a1, a2) = (p.real("amp_a")?, p.real("amp_b")?);
    let (c1, c2, c3) = (p.real("c1")?, p.real("c2")?, p.real("c3")?);
    let beta = m.beta;
    let [d0, d1, d2, d3] = co.delta;
    let (g1, g2) = (co.gamma1, co.gamma2);
    Ok(Solution::barotropic(name, move |t, x, y| {
        let q = y - nu * t;
        let homog = if trig {
            a1 * (w * q).sin() + a2 * (w * q).cos()
        } else {
            a1 * (w * q).sinh() + a2 * (w * q).cosh()
        };
        let v1 = homog - (((d3 * q + d2) * q + d1) * q + d0) / g2 + g1 / (g2 * g2) * (6.0 * d3 * q + 2.0 * d2);
        let v2 = ((nu - mu) * v1 - beta * mu * q.powi(3) / 3.0 + c1 * q * q + c2 * q + c3) / rho;
        Ok((v1 + 2.0 * mu * x, v2 + 2.0 * kappa * t + 2.0 * rho * x))
    }))
}

pub(crate) fn a23_trigonometric(p: &Resolved, m: &ModelParams) -> Result<Solution> {
    a23_solution("a23_trigonometric", p, m, true)
}

pub(crate) fn a23_exponential(p: &Resolved, m: &ModelParams) -> Result<Solution> {
    a23_solution("a23_exponential", p, m, false)
}

/// Polynomial in `x`, `y` with time-dependent coefficients; needs
/// `g = f''/β`.
pub(crate) fn a24_polynomial(p: &Resolved, m: &ModelParams) -> Result<Solution> {
    let f_exact = p.func("f")?;
    let (kappa, rho, c) = (p.real("kappa")?, p.real("rho")?, p.real("c")?);
    if kappa * rho != 0.0 {
        return Err(Error::branch("kappa*rho = 0", format!("kappa = {kappa}, rho = {rho}")));
    }
    let f = TimeFn::from(&f_exact);
    let f1 = f.derivative();
    let g = f1.derivative().scale(1.0 / m.beta);
    if p.is_given("g") {
        let given = TimeFn::from(&p.func("g")?);
        if !given.add(&g.scale(-1.0)).is_zero() {
            return Err(Error::branch("g = f''/beta", format!("g = {given}")));
        }
    }
    let theta = TimeFn::from(&p.func("theta")?);
    let (beta, fr) = (m.beta, m.froude);
    Ok(Solution::barotropic("a24_polynomial", move |t, x, y| {
        let (fv, d1, gv) = (f.eval(t), f1.eval(t), g.eval(t));
        let v2 = -2.0 * kappa * d1 / beta + beta * rho * t / fr + c;
        let plus = theta.eval(t) - d1 * y * y - 2.0 * gv * (fv * y - x);
        let minus = v2 + 2.0 * kappa * y - 2.0 * rho * (fv * y - x);
        Ok((plus, minus))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_matches_rotation() {
        let mut a = [[0.0; 4]; 4];
        a[0][1] = -3.0;
        a[1][0] = 3.0;
        a[2][2] = 1.5;
        let e = expm(&a);
        assert!((e[0][0] - 3f64.cos()).abs() < 1e-13);
        assert!((e[1][0] - 3f64.sin()).abs() < 1e-13);
        assert!((e[2][2] - 1.5f64.exp()).abs() < 1e-13);
        assert!(e[3][3] == 1.0);
    }
}
