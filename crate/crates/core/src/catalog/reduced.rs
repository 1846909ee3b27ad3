//! Reduced systems and their residuals on sampled candidates.
//!
//! Derivatives come from second-order central stencils (up to fourth order in
//! `p`, up to third order in `q`), so a candidate that solves the system
//! exactly leaves a residual of order `h²`.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{ModelParams, CONVERGENCE_RATIO};
use crate::transforms::TimeFn;

use super::params::{func, real, ParamSpec, ParamValues, Resolved};

const MAX_P: usize = 4;
const MAX_Q: usize = 3;
const HALO: i32 = 2;

/// Derivatives `∂ᵢ_p ∂ʲ_q` of every unknown at one node.
pub struct Jet {
    d: Vec<[[f64; MAX_Q + 1]; MAX_P + 1]>,
}

impl Jet {
    pub fn d(&self, unknown: usize, np: usize, nq: usize) -> f64 {
        self.d[unknown][np][nq]
    }

    fn magnitude(&self) -> f64 {
        self.d.iter().flatten().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

fn stencil(order: usize) -> [f64; 5] {
    match order {
        0 => [0.0, 0.0, 1.0, 0.0, 0.0],
        1 => [0.0, -0.5, 0.0, 0.5, 0.0],
        2 => [0.0, 1.0, -2.0, 1.0, 0.0],
        3 => [-0.5, 1.0, 0.0, -1.0, 0.5],
        _ => [1.0, -4.0, 6.0, -4.0, 1.0],
    }
}

/// Nodes on which a candidate is sampled.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleBox {
    pub p: (f64, f64),
    pub q: (f64, f64),
    pub np: usize,
    /// Ignored for ordinary differential systems.
    pub nq: usize,
}

impl SampleBox {
    pub fn new(p: (f64, f64), q: (f64, f64), np: usize, nq: usize) -> Self {
        SampleBox { p, q, np, nq }
    }

    pub fn refined(&self) -> Self {
        SampleBox { np: 2 * self.np, nq: 2 * self.nq, ..*self }
    }

    fn hp(&self) -> f64 {
        (self.p.1 - self.p.0) / self.np as f64
    }

    fn hq(&self) -> f64 {
        (self.q.1 - self.q.0) / self.nq as f64
    }
}

type Equation = Box<dyn Fn(f64, f64, &Jet) -> Vec<f64> + Send + Sync>;
type Setup = fn(&Resolved, &ModelParams) -> Result<Equation>;

pub struct ReducedSystem {
    pub name: &'static str,
    pub origin: &'static str,
    /// Names of the independent variables.
    pub variables: &'static [&'static str],
    pub unknowns: &'static [&'static str],
    pub params: &'static [ParamSpec],
    setup: Setup,
}

impl ReducedSystem {
    pub fn is_ordinary(&self) -> bool {
        self.variables.len() == 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReducedReport {
    pub system: String,
    pub h: f64,
    /// Per equation.
    pub max: Vec<f64>,
    pub rms: Vec<f64>,
    /// Largest sampled derivative, for judging round-off.
    pub scale: f64,
}

impl ReducedReport {
    pub fn worst(&self) -> f64 {
        self.max.iter().fold(0.0f64, |m, v| m.max(*v))
    }
}

impl fmt::Display for ReducedReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "system={} h={:e}", self.system, self.h)?;
        for (i, (m, r)) in self.max.iter().zip(&self.rms).enumerate() {
            write!(f, " eq{}_max={:e} eq{}_rms={:e}", i + 1, m, i + 1, r)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReducedConvergence {
    pub coarse: ReducedReport,
    pub fine: ReducedReport,
    pub ratio: f64,
    pub exact: bool,
    pub passed: bool,
}

/// Residuals this small relative to the sampled derivatives are round-off.
const FLOOR: f64 = 1e-8;

pub fn reduced_system(name: &str) -> Result<&'static ReducedSystem> {
    SYSTEMS
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownName(format!("reduced system `{name}`")))
}

pub fn reduced_systems() -> &'static [ReducedSystem] {
    &SYSTEMS
}

/// Residual of `candidate(p, q) = [u₁, u₂, …]` in the named system.
pub fn reduced_residual(
    name: &str,
    candidate: &dyn Fn(f64, f64) -> Result<Vec<f64>>,
    given: &ParamValues,
    model: &ModelParams,
    sample: &SampleBox,
) -> Result<ReducedReport> {
    let sys = reduced_system(name)?;
    let r = Resolved::new(name, sys.params, given)?;
    let eq = (sys.setup)(&r, model)?;
    let n = sys.unknowns.len();
    let ordinary = sys.is_ordinary();
    if sample.np == 0 || (!ordinary && sample.nq == 0) {
        return Err(Error::InvalidGrid("empty sample box".into()));
    }
    let (hp, hq) = (sample.hp(), if ordinary { 1.0 } else { sample.hq() });
    let q_nodes = if ordinary { 1 } else { sample.nq + 1 };
    let q_halo = if ordinary { 0 } else { HALO };
    let mut max: Vec<f64> = Vec::new();
    let mut sum2: Vec<f64> = Vec::new();
    let (mut scale, mut count) = (0.0f64, 0usize);
    for jq in 0..q_nodes {
        let q = sample.q.0 + jq as f64 * hq;
        for ip in 0..=sample.np {
            let p = sample.p.0 + ip as f64 * hp;
            // values on the 5×5 (or 5×1) neighbourhood
            let mut vals = vec![[[0.0; 5]; 5]; n];
            for b in -q_halo..=q_halo {
                for a in -HALO..=HALO {
                    let v = candidate(p + a as f64 * hp, q + b as f64 * hq)?;
                    if v.len() != n {
                        return Err(Error::branch(
                            "candidate arity",
                            format!("{name} has {n} unknowns, candidate gave {}", v.len()),
                        ));
                    }
                    for (u, x) in v.iter().enumerate() {
                        if !x.is_finite() {
                            return Err(Error::Singular(format!("candidate not finite at p={p}, q={q}")));
                        }
                        vals[u][(a + HALO) as usize][(b + HALO) as usize] = *x;
                    }
                }
            }
            let mut d = vec![[[0.0; MAX_Q + 1]; MAX_P + 1]; n];
            for (u, du) in d.iter_mut().enumerate() {
                for (i, row) in du.iter_mut().enumerate() {
                    let sp = stencil(i);
                    for (j, slot) in row.iter_mut().enumerate() {
                        if ordinary && j > 0 {
                            continue;
                        }
                        let sq = stencil(j);
                        let mut acc = 0.0;
                        for a in 0..5 {
                            for b in 0..5 {
                                if sp[a] != 0.0 && sq[b] != 0.0 {
                                    acc += sp[a] * sq[b] * vals[u][a][b];
                                }
                            }
                        }
                        *slot = acc / (hp.powi(i as i32) * hq.powi(j as i32));
                    }
                }
            }
            let jet = Jet { d };
            scale = scale.max(jet.magnitude());
            let res = eq(p, q, &jet);
            if max.is_empty() {
                max = vec![0.0; res.len()];
                sum2 = vec![0.0; res.len()];
            }
            for (k, r) in res.iter().enumerate() {
                max[k] = max[k].max(r.abs());
                sum2[k] += r * r;
            }
            count += 1;
        }
    }
    Ok(ReducedReport {
        system: name.to_string(),
        h: if ordinary { hp } else { hp.max(hq) },
        rms: sum2.iter().map(|s| (s / count as f64).sqrt()).collect(),
        max,
        scale,
    })
}

/// Residuals on `sample` and on its refinement.
pub fn reduced_convergence(
    name: &str,
    candidate: &dyn Fn(f64, f64) -> Result<Vec<f64>>,
    given: &ParamValues,
    model: &ModelParams,
    sample: &SampleBox,
) -> Result<ReducedConvergence> {
    let coarse = reduced_residual(name, candidate, given, model, sample)?;
    let fine = reduced_residual(name, candidate, given, model, &sample.refined())?;
    let ratio = coarse.worst() / fine.worst();
    let floor = |r: &ReducedReport| r.worst() <= FLOOR * r.scale.max(1.0);
    let exact = floor(&coarse) && floor(&fine);
    let passed = exact || ratio >= CONVERGENCE_RATIO;
    Ok(ReducedConvergence { coarse, fine, ratio, exact, passed })
}

/// `(value, first, second, third derivative)` of a parameter function.
#[derive(Clone)]
struct Coef {
    d: [TimeFn; 4],
}

impl Coef {
    fn new(f: TimeFn) -> Self {
        let f1 = f.derivative();
        let f2 = f1.derivative();
        let f3 = f2.derivative();
        Coef { d: [f, f1, f2, f3] }
    }

    fn get(r: &Resolved, name: &str) -> Result<Self> {
        Ok(Coef::new(TimeFn::from(&r.func(name)?)))
    }

    fn at(&self, k: usize, t: f64) -> f64 {
        self.d[k].eval(t)
    }
}

// ---- A¹₁ ----

fn a11(r: &Resolved, m: &ModelParams) -> Result<Equation> {
    let (a, b) = (r.real("a")?, r.real("b")?);
    let (beta, f) = (m.beta, m.froude);
    Ok(Box::new(move |_, _, j| {
        let w_p = |u| j.d(u, 3, 0) + j.d(u, 1, 2);
        let w_q = |u| j.d(u, 2, 1) + j.d(u, 0, 3);
        let (v1p, v1q, v2p, v2q) = (j.d(0, 1, 0), j.d(0, 0, 1), j.d(1, 1, 0), j.d(1, 0, 1));
        vec![
            a * w_q(0) - f * a * (v1q - v2q) + 2.0 * f * b - v1p * (w_q(0) + beta + f * v2q)
                + v1q * (w_p(0) + f * v2p),
            a * w_q(1) + f * a * (v1q - v2q) - 2.0 * f * b - v2p * (w_q(1) + beta + f * v1q)
                + v2q * (w_p(1) + f * v1p),
        ]
    }))
}

// ---- A¹₂ ----

fn a12(r: &Resolved, m: &ModelParams) -> Result<Equation> {
    let c = Coef::get(r, "f")?;
    let b = r.real("b")?;
    let (beta, fr) = (m.beta, m.froude);
    Ok(Box::new(move |_, q, j| {
        let (f, f1, f2) = (c.at(0, q), c.at(1, q), c.at(2, q));
        let (h, hq) = (1.0 + f * f, 2.0 * f * f1);
        vec![
            hq * j.d(0, 2, 0) + h * j.d(0, 2, 1) - 2.0 * f2 - b * h * j.d(1, 3, 0) + beta * j.d(0, 1, 0),
            hq * j.d(1, 2, 0) + h * j.d(1, 2, 1) - 2.0 * fr * j.d(1, 0, 1) - 2.0 * b * fr * j.d(0, 1, 0)
                - 2.0 * b * h * j.d(0, 3, 0)
                + beta * j.d(1, 1, 0),
        ]
    }))
}

fn hat_system(c: Coef, b: f64, m: &ModelParams) -> Equation {
    let (beta, fr) = (m.beta, m.froude);
    Box::new(move |_, q, j| {
        let (f, f1) = (c.at(0, q), c.at(1, q));
        let (h, hq) = (1.0 + f * f, 2.0 * f * f1);
        vec![
            hq * j.d(0, 1, 0) + h * j.d(0, 1, 1) + beta * j.d(0, 0, 0) - b * h * j.d(1, 2, 0),
            hq * j.d(1, 2, 0) + h * j.d(1, 2, 1) - 2.0 * fr * j.d(1, 0, 1) + beta * j.d(1, 1, 0)
                - 2.0 * b * (h * j.d(0, 3, 0) + fr * j.d(0, 1, 0)),
        ]
    })
}

fn a12_hat(r: &Resolved, m: &ModelParams) -> Result<Equation> {
    Ok(hat_system(Coef::get(r, "f")?, r.real("b")?, m))
}

fn a12_decoupled(r: &Resolved, m: &ModelParams) -> Result<Equation> {
    Ok(hat_system(Coef::get(r, "f")?, 0.0, m))
}

fn a12_light_cone(r: &Resolved, m: &ModelParams) -> Result<Equation> {
    let a = Coef::get(r, "a")?;
    let (beta, fr) = (m.beta, m.froude);
    Ok(Box::new(move |_, q, j| {
        let (av, aq) = (a.at(0, q), a.at(1, q));
        vec![
            j.d(0, 1, 1) + beta * j.d(0, 0, 0),
            j.d(1, 2, 1) - 2.0 * fr * (aq * j.d(1, 0, 0) + av * j.d(1, 0, 1)) + beta * j.d(1, 1, 0),
        ]
    }))
}

fn a12_single(r: &Resolved, m: &ModelParams) -> Result<Equation> {
    let a = Coef::get(r, "a")?;
    let (beta, fr) = (m.beta, m.froude);
    Ok(Box::new(move |_, q, j| {
        let (av, aq) = (a.at(0, q), a.at(1, q));
        vec![j.d(0, 2, 1) - 2.0 * fr * (aq * j.d(0, 0, 0) + av * j.d(0, 0, 1)) + beta * j.d(0, 1, 0)]
    }))
}

fn a12_constant_ode(r: &Resolved, m: &ModelParams) -> Result<Equation> {
    let (kappa, lambda, a) = (r.real("kappa")?, r.real("lambda")?, r.real("a")?);
    let (beta, fr) = (m.beta, m.froude);
    Ok(Box::new(move |_, _, j| {
        vec![
            kappa * j.d(0, 3, 0) - lambda * j.d(0, 2, 0) - (2.0 * a * fr * kappa + beta) * j.d(0, 1, 0)
                + 2.0 * a * fr * lambda * j.d(0, 0, 0),
        ]
    }))
}

fn whittaker_ode(r: &Resolved, m: &ModelParams) -> Result<Equation> {
    let (lambda, vk) = (r.real("lambda")?, r.real("varkappa")?);
    let (beta, fr) = (m.beta, m.froude);
    Ok(Box::new(move |x, _, j| {
        let kf = 2.0 * vk * fr;
        vec![
            x * j.d(0, 3, 0) + (lambda + 2.0) * j.d(0, 2, 0) + (beta - kf * x) * j.d(0, 1, 0)
                - kf * (lambda + 2.0) * j.d(0, 0, 0),
        ]
    }))
}

/// Exponential-in-`p` reduction of the coupled hat system; the unknowns are
/// functions of `q` only, so `q` plays the role of the ODE variable.
fn a12_exponential_ode(r: &Resolved, m: &ModelParams) -> Result<Equation> {
    let c = Coef::get(r, "f")?;
    let (b, lambda) = (r.real("b")?, r.real("lambda")?);
    let (beta, fr) = (m.beta, m.froude);
    Ok(Box::new(move |q, _, j| {
        let (f, f1) = (c.at(0, q), c.at(1, q));
        let (h, hq) = (1.0 + f * f, 2.0 * f * f1);
        let (w, wq, v, vq) = (j.d(0, 0, 0), j.d(0, 1, 0), j.d(1, 0, 0), j.d(1, 1, 0));
        let l2 = lambda * lambda;
        vec![
            lambda * h * wq + (lambda * hq + beta) * w - b * l2 * h * v,
            (l2 * h - 2.0 * fr) * vq + (l2 * hq + beta * lambda) * v - 2.0 * b * lambda * (l2 * h + fr) * w,
        ]
    }))
}

// ---- A¹₃ ----

fn a13(r: &Resolved, m: &ModelParams) -> Result<Equation> {
    a13_common(r, m, true)
}

fn a13_homogeneous(r: &Resolved, m: &ModelParams) -> Result<Equation> {
    a13_common(r, m, false)
}

fn a13_common(r: &Resolved, m: &ModelParams, forced: bool) -> Result<Equation> {
    let c = Coef::get(r, "f")?;
    let g = Coef::get(r, "g")?;
    let b = r.real("b")?;
    let (beta, fr) = (if forced { m.beta } else { 0.0 }, m.froude);
    Ok(Box::new(move |p, q, j| {
        let (f, f1, gv) = (c.at(0, q), c.at(1, q), g.at(0, q));
        let s = (f1 * p - gv) / f;
        let (vp, vm) = (0, 1);
        if forced {
            vec![
                j.d(vp, 2, 1) - s * (j.d(vp, 3, 0) + 2.0 * beta) + b / f * j.d(vm, 3, 0),
                j.d(vm, 2, 1) - 2.0 * fr * j.d(vm, 0, 1) - s * (j.d(vm, 3, 0) - 2.0 * fr * j.d(vm, 1, 0))
                    + b / f * (j.d(vp, 3, 0) + 2.0 * fr * j.d(vp, 1, 0) + 2.0 * beta),
            ]
        } else {
            vec![
                j.d(vp, 0, 1) - s * j.d(vp, 1, 0) + 2.0 * f1 / f * j.d(vp, 0, 0) + b / f * j.d(vm, 1, 0),
                j.d(vm, 2, 1) - 2.0 * fr * j.d(vm, 0, 1) - s * (j.d(vm, 3, 0) - 2.0 * fr * j.d(vm, 1, 0))
                    + b / f * (j.d(vp, 3, 0) + 2.0 * fr * j.d(vp, 1, 0)),
            ]
        }
    }))
}

fn a13_tilde(r: &Resolved, m: &ModelParams) -> Result<Equation> {
    let c = Coef::get(r, "f")?;
    let b = r.real("b")?;
    let fr = m.froude;
    Ok(Box::new(move |_, q, j| {
        let (f, f1) = (c.at(0, q), c.at(1, q));
        let (f2, f2q) = (f * f, 2.0 * f * f1);
        vec![
            f2q * j.d(0, 0, 0) + f2 * j.d(0, 0, 1) + b * f2 * j.d(1, 1, 0),
            f2q * j.d(1, 2, 0) + f2 * j.d(1, 2, 1) - 2.0 * fr * j.d(1, 0, 1)
                + b * (f2 * j.d(0, 3, 0) + 2.0 * fr * j.d(0, 1, 0)),
        ]
    }))
}

/// `f` is given as a function of the stretched time `q̄ = ∫f²`.
fn a13_potential(r: &Resolved, m: &ModelParams) -> Result<Equation> {
    let c = Coef::get(r, "f")?;
    let b = r.real("b")?;
    let fr = m.froude;
    Ok(Box::new(move |_, q, j| {
        let (f, f1) = (c.at(0, q), c.at(1, q));
        let f2 = f * f;
        vec![
            f2 * (2.0 * f * f1 * j.d(0, 2, 1) + f2 * j.d(0, 2, 2)) - 2.0 * fr * f2 * j.d(0, 0, 2)
                - b * b * (j.d(0, 4, 0) + 2.0 * fr / f2 * j.d(0, 2, 0)),
        ]
    }))
}

fn a13_exponential_ode(r: &Resolved, m: &ModelParams) -> Result<Equation> {
    let c = Coef::get(r, "f")?;
    let (b, lambda) = (r.real("b")?, r.real("lambda")?);
    let fr = m.froude;
    Ok(Box::new(move |q, _, j| {
        let (f, f1) = (c.at(0, q), c.at(1, q));
        let l2f2 = lambda * lambda * f * f;
        let den = l2f2 - 2.0 * fr;
        vec![
            j.d(0, 2, 0) + 4.0 * fr / den * f1 / f * j.d(0, 1, 0)
                - b * b * lambda * lambda * (l2f2 + 2.0 * fr) / den * j.d(0, 0, 0),
        ]
    }))
}

// ---- two-dimensional subalgebras ----

fn a21(r: &Resolved, m: &ModelParams) -> Result<Equation> {
    let (kappa, nu, mu, rho) = (r.real("kappa")?, r.real("nu")?, r.real("mu")?, r.real("rho")?);
    let (beta, f) = (m.beta, m.froude);
    let h = 1.0 + nu * nu;
    Ok(Box::new(move |_, _, j| {
        let (a, b) = (j.d(0, 1, 0), j.d(1, 1, 0));
        vec![
            -(rho + mu) * h * j.d(0, 3, 0) + f * mu * (a - b) - f * rho * (a + b) - 2.0 * f * kappa + beta * a,
            (rho - mu) * h * j.d(1, 3, 0) - f * mu * (a - b) + f * rho * (a + b) + 2.0 * f * kappa + beta * b,
        ]
    }))
}

fn a22(r: &Resolved, m: &ModelParams) -> Result<Equation> {
    let (nu, sigma, kappa) = (r.real("nu")?, r.real("sigma")?, r.real("kappa")?);
    let (beta, f) = (m.beta, m.froude);
    Ok(Box::new(move |p, _, j| {
        let z = nu + sigma * p;
        vec![
            z * j.d(0, 3, 0) + 2.0 * sigma * beta * p,
            z * j.d(1, 3, 0) - 2.0 * f * z * j.d(1, 1, 0) + 4.0 * f * kappa,
        ]
    }))
}

fn a23(r: &Resolved, m: &ModelParams) -> Result<Equation> {
    let (nu, mu, kappa, rho) = (r.real("nu")?, r.real("mu")?, r.real("kappa")?, r.real("rho")?);
    let (beta, f) = (m.beta, m.froude);
    Ok(Box::new(move |_, _, j| {
        let d = nu - mu;
        vec![
            d * j.d(0, 3, 0) - rho * j.d(1, 3, 0) - 2.0 * beta * mu,
            d * j.d(1, 3, 0) - rho * j.d(0, 3, 0) - 2.0 * f * d * j.d(1, 1, 0) - 2.0 * f * rho * j.d(0, 1, 0)
                + 4.0 * f * kappa
                - 2.0 * beta * rho,
        ]
    }))
}

fn a24(r: &Resolved, m: &ModelParams) -> Result<Equation> {
    let c = Coef::get(r, "f")?;
    let g = Coef::get(r, "g")?;
    let (kappa, rho) = (r.real("kappa")?, r.real("rho")?);
    let (beta, fr) = (m.beta, m.froude);
    Ok(Box::new(move |p, _, j| {
        let gv = g.at(0, p);
        vec![c.at(2, p) - beta * gv, j.d(1, 1, 0) + 2.0 * kappa * gv - beta * rho / fr]
    }))
}

const PQ: &[&str] = &["p", "q"];
const P: &[&str] = &["p"];
const Q: &[&str] = &["q"];

static SYSTEMS: [ReducedSystem; 18] = [
    ReducedSystem {
        name: "a11",
        origin: "travelling reduction p = x, q = y - a t with psi shifted by +-b t",
        variables: PQ,
        unknowns: &["v1", "v2"],
        params: &[real("a", "0"), real("b", "0")],
        setup: a11,
    },
    ReducedSystem {
        name: "a12",
        origin: "reduction by dy + X(f) + b F in barotropic/baroclinic form",
        variables: PQ,
        unknowns: &["w", "v"],
        params: &[func("f", "t/2"), real("b", "0")],
        setup: a12,
    },
    ReducedSystem {
        name: "a12_hat",
        origin: "the same reduction after integrating once and removing the forcing",
        variables: PQ,
        unknowns: &["w_hat", "v_hat"],
        params: &[func("f", "t/2"), real("b", "0")],
        setup: a12_hat,
    },
    ReducedSystem {
        name: "a12_decoupled",
        origin: "the hat system with b = 0",
        variables: PQ,
        unknowns: &["w_hat", "v_hat"],
        params: &[func("f", "t/2")],
        setup: a12_decoupled,
    },
    ReducedSystem {
        name: "a12_light_cone",
        origin: "the decoupled system in stretched time; Klein-Gordon in light-cone variables",
        variables: PQ,
        unknowns: &["w_bar", "v_bar"],
        params: &[func("a", "1")],
        setup: a12_light_cone,
    },
    ReducedSystem {
        name: "a12_single",
        origin: "the baroclinic equation v_ppq - 2F(Av)_q + beta v_p = 0",
        variables: PQ,
        unknowns: &["v"],
        params: &[func("a", "1")],
        setup: a12_single,
    },
    ReducedSystem {
        name: "a12_constant_ode",
        origin: "travelling reduction of the baroclinic equation for constant A",
        variables: P,
        unknowns: &["v"],
        params: &[real("kappa", "1"), real("lambda", "0"), real("a", "1")],
        setup: a12_constant_ode,
    },
    ReducedSystem {
        name: "whittaker_ode",
        origin: "scaling reduction of the baroclinic equation for A = varkappa q^2",
        variables: &["r"],
        unknowns: &["v"],
        params: &[real("lambda", "-2"), real("varkappa", "1")],
        setup: whittaker_ode,
    },
    ReducedSystem {
        name: "a12_exponential_ode",
        origin: "exponential-in-p reduction of the coupled hat system",
        variables: Q,
        unknowns: &["w_bar", "v_bar"],
        params: &[func("f", "t/2"), real("b", "0"), real("lambda", "1")],
        setup: a12_exponential_ode,
    },
    ReducedSystem {
        name: "a13",
        origin: "reduction by X(f) + Z(g) + b F, p = y, q = t",
        variables: PQ,
        unknowns: &["v_plus", "v_minus"],
        params: &[func("f", "1 + t/2"), func("g", "t"), real("b", "0")],
        setup: a13,
    },
    ReducedSystem {
        name: "a13_homogeneous",
        origin: "the same system with the polynomial forcing removed",
        variables: PQ,
        unknowns: &["v_plus", "v_minus"],
        params: &[func("f", "1 + t/2"), func("g", "t"), real("b", "0")],
        setup: a13_homogeneous,
    },
    ReducedSystem {
        name: "a13_tilde",
        origin: "the homogeneous system in the sheared variable f p - int g",
        variables: PQ,
        unknowns: &["v_plus", "v_minus"],
        params: &[func("f", "1 + t/2"), real("b", "0")],
        setup: a13_tilde,
    },
    ReducedSystem {
        name: "a13_potential",
        origin: "potential form of the sheared system in stretched time",
        variables: PQ,
        unknowns: &["V"],
        params: &[func("f", "1 + t/2"), real("b", "0")],
        setup: a13_potential,
    },
    ReducedSystem {
        name: "a13_exponential_ode",
        origin: "exponential-in-p reduction of the sheared system, eliminated to one equation",
        variables: Q,
        unknowns: &["u"],
        params: &[func("f", "1 + t/2"), real("b", "1"), real("lambda", "1")],
        setup: a13_exponential_ode,
    },
    ReducedSystem {
        name: "a21",
        origin: "stationary reduction p = x - nu y",
        variables: P,
        unknowns: &["v1", "v2"],
        params: &[real("kappa", "1"), real("nu", "0.5"), real("mu", "0"), real("rho", "0")],
        setup: a21,
    },
    ReducedSystem {
        name: "a22",
        origin: "reduction p = y - nu t with the sigma-dependent x shear",
        variables: P,
        unknowns: &["v1", "v2"],
        params: &[real("nu", "1"), real("sigma", "0.5"), real("kappa", "1")],
        setup: a22,
    },
    ReducedSystem {
        name: "a23",
        origin: "reduction p = y - nu t with constant x winds",
        variables: P,
        unknowns: &["v1", "v2"],
        params: &[real("nu", "1"), real("mu", "0.5"), real("kappa", "1"), real("rho", "1")],
        setup: a23,
    },
    ReducedSystem {
        name: "a24",
        origin: "reduction to functions of time only",
        variables: &["t"],
        unknowns: &["v1", "v2"],
        params: &[func("f", "t^2"), func("g", "2"), real("kappa", "0"), real("rho", "0.5")],
        setup: a24,
    },
];

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::algebra::ExpPoly;
    use crate::catalog::{build, extended_reduction_chain, rk4, whittaker_series, Solution};

    fn model() -> ModelParams {
        ModelParams::default()
    }

    fn pv(s: &str) -> ParamValues {
        ParamValues::parse(s).unwrap()
    }

    fn converges(name: &str, cand: &dyn Fn(f64, f64) -> Result<Vec<f64>>, given: &ParamValues, sample: SampleBox) {
        let c = reduced_convergence(name, cand, given, &model(), &sample).unwrap();
        assert!(c.passed, "{name}: {} / {} ratio {}", c.coarse, c.fine, c.ratio);
    }

    fn plus_minus(s: &Solution, t: f64, x: f64, y: f64) -> Result<Vec<f64>> {
        let (a, b) = s.eval_barotropic(t, x, y)?;
        Ok(vec![a, b])
    }

    fn layers(s: &Solution, t: f64, x: f64, y: f64) -> Result<Vec<f64>> {
        use crate::model::ExactSolution;
        let (a, b) = s.eval(t, x, y)?;
        Ok(vec![a, b])
    }

    #[test]
    fn zero_candidate_on_homogeneous_systems() {
        let zero = |_: f64, _: f64| Ok(vec![0.0, 0.0]);
        let one = |_: f64, _: f64| Ok(vec![0.0]);
        let sample = SampleBox::new((0.0, 1.0), (0.1, 0.5), 8, 4);
        for (name, given) in [
            ("a12_hat", pv("b=0.7")),
            ("a12_decoupled", pv("")),
            ("a12_light_cone", pv("a=exp(-t)")),
            ("a13_homogeneous", pv("b=0.3")),
            ("a13_tilde", pv("b=2")),
            ("a21", pv("kappa=0,mu=0.3,rho=0.1")),
            ("a12_exponential_ode", pv("b=1,lambda=2")),
        ] {
            let r = reduced_residual(name, &zero, &given, &model(), &sample).unwrap();
            assert_eq!(r.worst(), 0.0, "{name}");
        }
        for name in ["a12_single", "a12_constant_ode", "whittaker_ode", "a13_potential", "a13_exponential_ode"] {
            let r = reduced_residual(name, &one, &ParamValues::new(), &model(), &sample).unwrap();
            assert_eq!(r.worst(), 0.0, "{name}");
        }
    }

    #[test]
    fn unknown_system_and_arity() {
        let c = |_: f64, _: f64| Ok(vec![0.0]);
        let s = SampleBox::new((0.0, 1.0), (0.0, 1.0), 4, 4);
        assert!(matches!(
            reduced_residual("nope", &c, &ParamValues::new(), &model(), &s),
            Err(Error::UnknownName(_))
        ));
        assert!(reduced_residual("a21", &c, &ParamValues::new(), &model(), &s).is_err());
        assert_eq!(reduced_systems().len(), 18);
    }

    #[test]
    fn travelling_reduction_of_a_rossby_wave() {
        // cos(kx + ly + ωt) = cos(kp + lq) with q = y − at when ω = −la
        let (k, l) = (3.0, 2.0);
        let omega = k / (k * k + l * l);
        let a = -omega / l;
        let cand = move |p: f64, q: f64| {
            let v = (k * p + l * q).cos();
            Ok(vec![v, v])
        };
        converges("a11", &cand, &pv(&format!("a={a},b=0")), SampleBox::new((0.0, 1.0), (0.0, 1.0), 12, 12));
    }

    #[test]
    fn generalized_wave_solves_the_direction_reduction() {
        let f = "t/2 + 1/4 t^2";
        let s = build("generalized_wave", &pv("k=2").with("f", f), &model()).unwrap();
        let cand = |p: f64, q: f64| plus_minus(&s, q, p, 0.0);
        converges("a12", &cand, &ParamValues::new().with("f", f), SampleBox::new((-1.0, 1.0), (0.2, 0.6), 12, 8));

        // remove the forcing correction to obtain the hat unknowns
        let fx = TimeFn::from(&f.parse::<ExpPoly>().unwrap());
        let (f1, f2) = (fx.derivative(), fx.derivative().derivative());
        let f3 = f2.derivative();
        let hat = |p: f64, q: f64| {
            let (fv, d1, d2, d3) = (fx.eval(q), f1.eval(q), f2.eval(q), f3.eval(q));
            let (h, hq) = (1.0 + fv * fv, 2.0 * fv * d1);
            let v = plus_minus(&s, q, p, 0.0)?;
            Ok(vec![v[0] + 2.0 * (hq * d2 + h * d3) - 2.0 * d2 * p, v[1]])
        };
        converges("a12_decoupled", &hat, &ParamValues::new().with("f", f), SampleBox::new((-1.0, 1.0), (0.2, 0.6), 12, 8));
    }

    #[test]
    fn light_cone_form() {
        // f constant: H = 2, A = 1/2, stretched time q̄ = q/2
        let k = 1.5;
        let cand = move |p: f64, q: f64| {
            let w = (k * p + q / k).cos();
            let v = (k * p + k * q / (2.0 * (0.5) + k * k)).cos();
            Ok(vec![w, v])
        };
        converges("a12_light_cone", &cand, &pv("a=1/2"), SampleBox::new((0.0, 2.0), (0.0, 1.0), 12, 8));
    }

    #[test]
    fn exponential_reduction_of_the_coupled_system() {
        let (b, lambda) = (0.5, 2.0);
        let f = TimeFn::from(&"t/2".parse::<ExpPoly>().unwrap());
        let (beta, fr) = (1.0, 1.0);
        let profile = move |q: f64| {
            let steps = ((q / 2e-3).ceil() as usize).max(1);
            let end = rk4(vec![1.0, 0.5], 0.0, q, steps, |t, y| {
                let (fv, f1) = (f.eval(t), 0.5);
                let (h, hq) = (1.0 + fv * fv, 2.0 * fv * f1);
                let l2 = lambda * lambda;
                vec![
                    (b * l2 * h * y[1] - (lambda * hq + beta) * y[0]) / (lambda * h),
                    (2.0 * b * lambda * (l2 * h + fr) * y[0] - (l2 * hq + beta * lambda) * y[1]) / (l2 * h - 2.0 * fr),
                ]
            });
            end.last().unwrap().clone()
        };
        let given = pv(&format!("b={b},lambda={lambda}")).with("f", "t/2");
        let ode = |q: f64, _: f64| Ok(profile(q));
        converges("a12_exponential_ode", &ode, &given, SampleBox::new((0.2, 0.6), (0.0, 0.0), 8, 1));
        let full = |p: f64, q: f64| {
            let y = profile(q);
            let e = (lambda * p).exp();
            Ok(vec![y[0] * e, y[1] * e])
        };
        let given = pv(&format!("b={b}")).with("f", "t/2");
        converges("a12_hat", &full, &given, SampleBox::new((0.0, 0.5), (0.2, 0.6), 8, 8));
    }

    #[test]
    fn chain_members_solve_the_single_equation() {
        let chain = extended_reduction_chain(Complex64::new(1.0, 0.0), &ExpPoly::one(), &[1.0, 1.0, 1.0], (0.0, 1.0)).unwrap();
        for a in 1..=3 {
            let cand = |p: f64, q: f64| Ok(vec![chain.eval(a, p, q)?.re]);
            converges("a12_single", &cand, &ParamValues::new(), SampleBox::new((0.0, 1.0), (0.0, 1.0), 8, 8));
        }
    }

    #[test]
    fn tabulated_chain_solves_the_single_equation() {
        let a: ExpPoly = "2 + exp(-t)".parse().unwrap();
        let chain = extended_reduction_chain(Complex64::new(1.0, 0.5), &a, &[1.0, -0.5], (0.0, 1.0)).unwrap();
        for k in 1..=2 {
            for imag in [false, true] {
                let cand = |p: f64, q: f64| {
                    let v = chain.eval(k, p, q)?;
                    Ok(vec![if imag { v.im } else { v.re }])
                };
                let given = ParamValues::new().with("a", "2 + exp(-t)");
                converges("a12_single", &cand, &given, SampleBox::new((0.0, 1.0), (0.25, 0.75), 8, 8));
            }
        }
    }

    #[test]
    fn constant_coefficient_ode() {
        let (kappa, a, s) = (0.7, 0.8, 1.3);
        let lambda = s * (-kappa * s * s + 2.0 * a * kappa + 1.0) / (2.0 * a - s * s);
        let cand = move |r: f64, _: f64| Ok(vec![(s * r).exp()]);
        let given = pv(&format!("kappa={kappa},a={a},lambda={lambda}"));
        converges("a12_constant_ode", &cand, &given, SampleBox::new((0.0, 1.0), (0.0, 0.0), 16, 1));
    }

    #[test]
    fn whittaker_profile_and_polynomials() {
        let cand = |r: f64, _: f64| Ok(vec![whittaker_series(1.0, 1.0, r).0]);
        converges("whittaker_ode", &cand, &pv("lambda=-2,varkappa=1"), SampleBox::new((0.2, 2.0), (0.0, 0.0), 16, 1));
        // λ = −4: polynomial kernel of degree 2
        let ker = crate::catalog::polynomial_solutions(4, &crate::algebra::rat_int(1), &crate::algebra::rat_int(1), 5).unwrap();
        let c: Vec<f64> = ker.basis[0].iter().map(crate::algebra::coeff::rat_to_f64).collect();
        let poly = move |r: f64, _: f64| Ok(vec![c.iter().rev().fold(0.0, |acc, a| acc * r + a)]);
        let rep = reduced_residual("whittaker_ode", &poly, &pv("lambda=-4,varkappa=1"), &model(), &SampleBox::new((0.0, 3.0), (0.0, 0.0), 8, 1)).unwrap();
        assert!(rep.worst() < 1e-10, "{rep}");
    }

    #[test]
    fn decoupled_planar_solution() {
        let s = build("a13_decoupled", &ParamValues::new(), &model()).unwrap();
        let cand = |p: f64, q: f64| plus_minus(&s, q, 0.0, p);
        let sample = SampleBox::new((-0.5, 0.5), (0.2, 0.6), 10, 8);
        converges("a13", &cand, &ParamValues::new(), sample);
    }

    #[test]
    fn exponential_modes_drop_out_of_the_baroclinic_equation() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let root = 2f64.sqrt();
        for _ in 0..10 {
            let c: Vec<f64> = (0..8).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let cand = move |p: f64, q: f64| {
                let th1 = c[0] + c[1] * q + c[2] * q * q + c[3] * (c[3] * q).sin();
                let th2 = c[4] + c[5] * q * q * q + c[6] * (c[7] * q).exp();
                Ok(vec![0.0, th1 * (root * p).exp() + th2 * (-root * p).exp()])
            };
            let r = reduced_convergence("a13_homogeneous", &cand, &ParamValues::new(), &model(), &SampleBox::new((-0.5, 0.5), (0.0, 1.0), 8, 8)).unwrap();
            assert!(r.passed, "{} ratio {}", r.coarse, r.ratio);
        }
    }

    #[test]
    fn sheared_and_potential_forms() {
        let f = TimeFn::from(&"1 + t/2".parse::<ExpPoly>().unwrap());
        let cand = |p: f64, q: f64| {
            let fv = f.eval(q);
            Ok(vec![p.sin() / (fv * fv), p.cos() / (fv * fv + 2.0)])
        };
        converges("a13_tilde", &cand, &ParamValues::new(), SampleBox::new((-1.0, 1.0), (0.0, 1.0), 10, 8));

        // f ≡ 1, b = 1: plane waves with ω² = b²k²(k² − 2F)/(k² + 2F)
        let k = 2.0f64;
        let omega = (k * k * (k * k - 2.0) / (k * k + 2.0)).sqrt();
        let wave = move |p: f64, q: f64| Ok(vec![(k * p + omega * q).cos()]);
        converges("a13_potential", &wave, &pv("f=1,b=1"), SampleBox::new((0.0, 1.0), (0.0, 1.0), 10, 10));
        let decoupled = |p: f64, _: f64| Ok(vec![-p.cos()]);
        converges("a13_potential", &decoupled, &ParamValues::new(), SampleBox::new((0.0, 1.0), (0.0, 1.0), 10, 10));
    }

    #[test]
    fn eliminated_exponential_equation() {
        // constant f = 2, λ = 1: u'' = 3b² u
        let b: f64 = 0.8;
        let rate = 3f64.sqrt() * b;
        let cand = move |q: f64, _: f64| Ok(vec![(rate * q).exp() + 0.5 * (-rate * q).exp()]);
        converges("a13_exponential_ode", &cand, &pv(&format!("f=2,b={b},lambda=1")), SampleBox::new((0.0, 1.0), (0.0, 0.0), 16, 1));

        // varying f: integrate the first-order pair and check the eliminated form
        let f = TimeFn::from(&"1 + t/2".parse::<ExpPoly>().unwrap());
        let (lambda, fr) = (2.0, 1.0);
        let profile = move |q: f64| {
            let steps = ((q / 2e-3).ceil() as usize).max(1);
            let end = rk4(vec![1.0, 0.3], 0.0, q, steps, |t, y| {
                // y = [u, (λ²f² − 2F) v]
                let fv = f.eval(t);
                let d = lambda * lambda * fv * fv - 2.0 * fr;
                vec![-b * fv * fv * lambda * y[1] / d, -b * lambda * (lambda * lambda + 2.0 * fr / (fv * fv)) * y[0]]
            });
            end.last().unwrap()[0]
        };
        let cand = |q: f64, _: f64| Ok(vec![profile(q)]);
        converges("a13_exponential_ode", &cand, &pv(&format!("b={b},lambda={lambda}")), SampleBox::new((0.2, 0.8), (0.0, 0.0), 8, 1));
    }

    fn stationary(entry: &str, given: &ParamValues, sys: &str, sys_params: &ParamValues) {
        let s = build(entry, given, &model()).unwrap();
        let cand = |p: f64, _: f64| layers(&s, 0.0, p, 0.0);
        converges(sys, &cand, sys_params, SampleBox::new((-1.0, 1.0), (0.0, 0.0), 16, 1));
    }

    #[test]
    fn stationary_cases() {
        stationary("a21_constant_wind", &ParamValues::new(), "a21", &pv("kappa=1,nu=0.5,mu=0,rho=0"));
        stationary("a21_exponential", &ParamValues::new(), "a21", &pv("kappa=1,nu=0.5,mu=0.5,rho=0.5"));
        stationary("a21_exponential", &pv("rho=-0.5"), "a21", &pv("kappa=1,nu=0.5,mu=0.5,rho=-0.5"));
        stationary("a21_stationary_wave", &ParamValues::new(), "a21", &pv("kappa=1,nu=0.5,mu=-1,rho=-1"));
        stationary("a21_stationary_wave", &pv("rho=1"), "a21", &pv("kappa=1,nu=0.5,mu=-1,rho=1"));
        stationary("a21_general", &ParamValues::new(), "a21", &pv("kappa=1,nu=0.5,mu=0.3,rho=0.8"));
    }

    #[test]
    fn travelling_cases() {
        let m = model();
        let s = build("a22_exponential_integral", &pv("c1=0.3,c4=0.2,c6=1"), &m).unwrap();
        let cand = |p: f64, _: f64| plus_minus(&s, 0.0, 0.0, p);
        converges("a22", &cand, &ParamValues::new(), SampleBox::new((-0.5, 0.5), (0.0, 0.0), 16, 1));
        for (entry, given) in [("a23_trigonometric", "nu=1,mu=0.5,kappa=1,rho=1"), ("a23_exponential", "nu=2,mu=0,kappa=1,rho=1")] {
            let s = build(entry, &ParamValues::new(), &m).unwrap();
            let cand = |p: f64, _: f64| plus_minus(&s, 0.0, 0.0, p);
            converges("a23", &cand, &pv(given), SampleBox::new((-0.5, 0.5), (0.0, 0.0), 16, 1));
        }
    }

    #[test]
    fn time_only_case() {
        let s = build("a24_polynomial", &ParamValues::new(), &model()).unwrap();
        let cand = |t: f64, _: f64| plus_minus(&s, t, 0.0, 0.0);
        let sample = SampleBox::new((0.0, 1.0), (0.0, 0.0), 8, 1);
        converges("a24", &cand, &ParamValues::new(), sample);
        // g ≠ f''/β leaves the compatibility equation unsatisfied
        let r = reduced_residual("a24", &cand, &pv("g=1"), &model(), &sample).unwrap();
        assert!((r.max[0] - 1.0).abs() < 1e-12);
    }
}
