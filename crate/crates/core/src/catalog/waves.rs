//! Travelling-wave families from the reduction along `∂y + X(f)`.

use std::sync::Mutex;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::transforms::TimeFn;

use super::params::Resolved;
use super::quad::integrate_auto;
use super::solution::{guard, Solution};

/// Barotropic and baroclinic plane waves of a common wave vector.
pub(crate) fn rossby_wave(p: &Resolved, m: &ModelParams) -> Result<Solution> {
    let (k, l) = (p.real("k")?, p.real("l")?);
    let k2 = k * k + l * l;
    if k2 == 0.0 {
        return Err(Error::branch("k^2 + l^2 > 0", "zero wave vector"));
    }
    let (a_bt, a_bc) = (p.real("amp_bt")?, p.real("amp_bc")?);
    let (ph_bt, ph_bc) = (p.real("phase_bt")?, p.real("phase_bc")?);
    let w_bt = barotropic_frequency(m, k, l);
    let w_bc = baroclinic_frequency(m, k, l);
    Ok(Solution::barotropic("rossby_wave", move |t, x, y| {
        let arg = k * x + l * y;
        Ok((a_bt * (arg + w_bt * t + ph_bt).cos(), a_bc * (arg + w_bc * t + ph_bc).cos()))
    }))
}

/// `ω` in `cos(kx + ly + ωt)` for the barotropic mode.
pub fn barotropic_frequency(m: &ModelParams, k: f64, l: f64) -> f64 {
    m.beta * k / (k * k + l * l)
}

/// `ω` in `cos(kx + ly + ωt)` for the baroclinic mode.
pub fn baroclinic_frequency(m: &ModelParams, k: f64, l: f64) -> f64 {
    m.beta * k / (k * k + l * l + 2.0 * m.froude)
}

/// `∫₀ᵗ g`, remembering the last evaluation since the residual sweeps a
/// whole grid at one time level.
struct Primitive {
    g: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    last: Mutex<Option<(f64, f64)>>,
}

impl Primitive {
    fn new(g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Primitive { g: Box::new(g), last: Mutex::new(None) }
    }

    fn at(&self, t: f64) -> f64 {
        let mut last = self.last.lock().unwrap_or_else(|e| e.into_inner());
        if let Some((s, v)) = *last {
            if s == t {
                return v;
            }
        }
        let v = integrate_auto(&self.g, 0.0, t);
        *last = Some((t, v));
        v
    }
}

/// Waves along the time-dependent direction `p = x − f(t) y`.
pub(crate) fn generalized_wave(p: &Resolved, m: &ModelParams) -> Result<Solution> {
    let f = TimeFn::from(&p.func("f")?);
    let k = p.real("k")?;
    if k == 0.0 {
        return Err(Error::branch("k != 0", "k = 0"));
    }
    let (a_bt, a_bc) = (p.real("amp_bt")?, p.real("amp_bc")?);
    let (beta, froude) = (m.beta, m.froude);
    let (f1, f2) = (f.derivative(), f.derivative().derivative());
    let f3 = f2.derivative();
    let h = {
        let f = f.clone();
        move |t: f64| 1.0 + f.eval(t).powi(2)
    };
    let slow = {
        let h = h.clone();
        Primitive::new(move |t| 1.0 / h(t))
    };
    let fast = {
        let h = h.clone();
        Primitive::new(move |t| 1.0 / (2.0 * froude + k * k * h(t)))
    };
    Ok(Solution::barotropic("generalized_wave", move |t, x, y| {
        let (fv, d1, d2, d3) = (f.eval(t), f1.eval(t), f2.eval(t), f3.eval(t));
        let hv = h(t);
        let hp = 2.0 * fv * d1;
        let pp = x - fv * y;
        let w_hat = a_bt / hv * (k * pp + beta * slow.at(t) / k).cos();
        let w = w_hat - 2.0 * (hp * d2 + hv * d3) / (beta * beta) + 2.0 * d2 * pp / beta;
        let plus = w - d1 * y * y;
        let minus = a_bc / (2.0 * froude + k * k * hv) * (k * pp + beta * k * fast.at(t)).cos();
        Ok((plus, minus))
    }))
}

/// Baroclinic modes `Re exp(s r + λ q̄)` of the constant-direction reduction,
/// with `λ` fixed by the characteristic root `s`.
pub(crate) fn constant_coefficient(p: &Resolved, m: &ModelParams) -> Result<Solution> {
    let f = p.real("f")?;
    let s = Complex64::new(p.real("s_re")?, p.real("s_im")?);
    let kappa = p.real("kappa")?;
    let amp = p.real("amp")?;
    let h = 1.0 + f * f;
    let af = m.froude / h;
    let denom = 2.0 * af - s * s;
    guard(denom.norm(), 2.0 * af + s.norm_sqr(), "2AF - s^2")?;
    let lambda = s * (-kappa * s * s + 2.0 * af * kappa + m.beta) / denom;
    Ok(Solution::barotropic("a12_constant_coefficient", move |t, x, y| {
        let qb = t / h;
        let r = x - f * y - kappa * qb;
        let v = amp * (s * r + lambda * qb).exp().re / h;
        Ok((0.0, v))
    }))
}
