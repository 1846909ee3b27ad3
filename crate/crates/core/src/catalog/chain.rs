//! Jordan-block chains of solutions of `v_ppq − 2(Av)_q + v_p = 0`.

use num_complex::Complex64;

use crate::algebra::ExpPoly;
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::transforms::TimeFn;

use super::ode::rk4;
use super::params::Resolved;
use super::solution::{guard, Solution};

type C = Complex64;

#[derive(Clone, Debug)]
enum Profiles {
    /// `φᵏ(q) = e^{α(q−q₀)} Pₖ(q−q₀)`, available for constant `A`.
    Closed { alpha: C, polys: Vec<Vec<C>> },
    /// `(φᵏ, φᵏ_q)` tabulated on a uniform mesh.
    Table { step: f64, values: Vec<Vec<(C, C)>> },
}

/// The functions `φ¹ … φᵐ` and the chain `vᵃ` assembled from them.
#[derive(Clone, Debug)]
pub struct Chain {
    pub lambda: C,
    pub q_range: (f64, f64),
    profiles: Profiles,
}

fn poly_eval(c: &[C], s: f64) -> (C, C) {
    let mut v = C::new(0.0, 0.0);
    let mut d = C::new(0.0, 0.0);
    for a in c.iter().rev() {
        d = d * s + v;
        v = v * s + a;
    }
    (v, d)
}

fn poly_derivative(c: &[C]) -> Vec<C> {
    c.iter().enumerate().skip(1).map(|(k, a)| a * k as f64).collect()
}

fn poly_add(a: &mut Vec<C>, b: &[C], s: C) {
    if a.len() < b.len() {
        a.resize(b.len(), C::new(0.0, 0.0));
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x += y * s;
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Builds the chain of length `c.len()` with `φᵏ(q₀) = cₖ`.
pub fn extended_reduction_chain(lambda: C, a: &ExpPoly, c: &[f64], q_range: (f64, f64)) -> Result<Chain> {
    if c.is_empty() {
        return Err(Error::branch("m >= 1", "no constants given"));
    }
    let (q0, q1) = q_range;
    if !(q1 > q0) {
        return Err(Error::branch("q_range increasing", format!("[{q0}, {q1}]")));
    }
    let l2 = lambda * lambda;
    let profiles = match a.as_constant() {
        Some(av) => {
            let av = av.to_f64();
            let d = C::new(2.0 * av, 0.0) - l2;
            guard(d.norm(), 2.0 * av.abs() + l2.norm(), "2A - lambda^2")?;
            let alpha = lambda / d;
            let mut polys: Vec<Vec<C>> = Vec::with_capacity(c.len());
            for (k, ck) in c.iter().enumerate() {
                // integrand of the recursion with the exponential divided out
                let mut r: Vec<C> = Vec::new();
                if k >= 1 {
                    let prev = &polys[k - 1];
                    poly_add(&mut r, prev, C::new(1.0, 0.0) + 2.0 * lambda * alpha);
                    poly_add(&mut r, &poly_derivative(prev), 2.0 * lambda);
                }
                if k >= 2 {
                    let pp = &polys[k - 2];
                    poly_add(&mut r, pp, alpha);
                    poly_add(&mut r, &poly_derivative(pp), C::new(1.0, 0.0));
                }
                let mut p = vec![C::new(*ck, 0.0)];
                for (j, rj) in r.iter().enumerate() {
                    if p.len() < j + 2 {
                        p.resize(j + 2, C::new(0.0, 0.0));
                    }
                    p[j + 1] += rj / d / (j + 1) as f64;
                }
                polys.push(p);
            }
            Profiles::Closed { alpha, polys }
        }
        None => tabulate(lambda, a, c, q_range)?,
    };
    Ok(Chain { lambda, q_range, profiles })
}

fn tabulate(lambda: C, a: &ExpPoly, c: &[f64], (q0, q1): (f64, f64)) -> Result<Profiles> {
    let av = TimeFn::from(a);
    let aq = av.derivative();
    let l2 = lambda * lambda;
    let steps = ((q1 - q0) * 2000.0).ceil().max(2000.0) as usize;
    let step = (q1 - q0) / steps as f64;
    // locate a root of 2A − λ² on the mesh
    if l2.im.abs() <= 1e-12 * l2.norm().max(1.0) {
        let g = |q: f64| 2.0 * av.eval(q) - l2.re;
        let scale = l2.re.abs().max(1.0);
        for i in 0..steps {
            let (qa, qb) = (q0 + i as f64 * step, q0 + (i + 1) as f64 * step);
            let (ga, gb) = (g(qa), g(qb));
            if ga.abs() <= 1e-8 * scale || ga * gb < 0.0 {
                return Err(Error::Singular(format!("2A - lambda^2 vanishes near q = {qa:.6}")));
            }
        }
    }
    let m = c.len();
    let deriv = |q: f64, phi: &[C]| -> Vec<C> {
        let (a0, a1) = (av.eval(q), aq.eval(q));
        let den = l2 - 2.0 * a0;
        let mut d: Vec<C> = Vec::with_capacity(m);
        for k in 0..m {
            let mut src = C::new(0.0, 0.0);
            if k >= 1 {
                src += 2.0 * lambda * d[k - 1] + phi[k - 1];
            }
            if k >= 2 {
                src += d[k - 2];
            }
            d.push((2.0 * a1 * phi[k] - lambda * phi[k] - src) / den);
        }
        d
    };
    let y0: Vec<C> = c.iter().map(|v| C::new(*v, 0.0)).collect();
    let states = rk4(y0, q0, q1, steps, deriv);
    let values = states
        .iter()
        .enumerate()
        .map(|(i, y)| {
            let d = deriv(q0 + i as f64 * step, y);
            y.iter().copied().zip(d).collect()
        })
        .collect();
    Ok(Profiles::Table { step, values })
}

impl Chain {
    pub fn len(&self) -> usize {
        match &self.profiles {
            Profiles::Closed { polys, .. } => polys.len(),
            Profiles::Table { values, .. } => values[0].len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(φᵏ, φᵏ_q)` for `k = 1 … m`. Tabulated profiles exist only on
    /// `q_range`; closed forms extend to all `q`.
    pub fn profile(&self, k: usize, q: f64) -> Result<(C, C)> {
        if k == 0 || k > self.len() {
            return Err(Error::branch("1 <= k <= m", format!("k = {k}")));
        }
        let (q0, q1) = self.q_range;
        match &self.profiles {
            Profiles::Closed { alpha, polys } => {
                let s = q - q0;
                let (p, dp) = poly_eval(&polys[k - 1], s);
                let e = (alpha * s).exp();
                Ok((e * p, e * (alpha * p + dp)))
            }
            Profiles::Table { step, values } => {
                let tol = 1e-12 * (q1 - q0);
                if q < q0 - tol || q > q1 + tol {
                    return Err(Error::Singular(format!("q = {q} outside [{q0}, {q1}]")));
                }
                let x = ((q - q0) / step).clamp(0.0, (values.len() - 1) as f64);
                let i = (x.floor() as usize).min(values.len() - 2);
                let s = x - i as f64;
                let (y0, d0) = values[i][k - 1];
                let (y1, d1) = values[i + 1][k - 1];
                // cubic Hermite
                let (h00, h10, h01, h11) = (
                    2.0 * s.powi(3) - 3.0 * s * s + 1.0,
                    s.powi(3) - 2.0 * s * s + s,
                    -2.0 * s.powi(3) + 3.0 * s * s,
                    s.powi(3) - s * s,
                );
                let v = y0 * h00 + d0 * (h10 * step) + y1 * h01 + d1 * (h11 * step);
                let dh00 = (6.0 * s * s - 6.0 * s) / step;
                let dh10 = 3.0 * s * s - 4.0 * s + 1.0;
                let dh01 = -dh00;
                let dh11 = 3.0 * s * s - 2.0 * s;
                let dv = y0 * dh00 + d0 * dh10 + y1 * dh01 + d1 * dh11;
                Ok((v, dv))
            }
        }
    }

    /// `vᵃ(p, q) = e^{λp} Σ_{b≤a} φᵇ(q) p^{a−b}/(a−b)!`
    pub fn eval(&self, a: usize, p: f64, q: f64) -> Result<C> {
        if a == 0 || a > self.len() {
            return Err(Error::branch("1 <= a <= m", format!("a = {a}")));
        }
        let mut sum = C::new(0.0, 0.0);
        for b in 1..=a {
            let (phi, _) = self.profile(b, q)?;
            sum += phi * p.powi((a - b) as i32) / factorial(a - b);
        }
        Ok((self.lambda * p).exp() * sum)
    }
}

/// The chain lifted to the full model: `ψ⁺ = 0`, `ψ⁻ = vᵃ(x − f y, t/H)/H`
/// with constant `A = 1/H`.
pub(crate) fn chain_solution(p: &Resolved, m: &ModelParams) -> Result<Solution> {
    if m.beta != 1.0 || m.froude != 1.0 {
        return Err(Error::branch("beta = F = 1", format!("beta = {}, F = {}", m.beta, m.froude)));
    }
    let a = p.real("a")?;
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::branch("0 < A <= 1", format!("A = {a}")));
    }
    let len = p.int("m")?;
    let index = p.int("index")?;
    if !(1..=3).contains(&len) || !(1..=len).contains(&index) {
        return Err(Error::branch("1 <= index <= m <= 3", format!("m = {len}, index = {index}")));
    }
    let c: Vec<f64> = (1..=len as usize).map(|k| p.real(&format!("c{k}"))).collect::<Result<_>>()?;
    let lambda = C::new(p.real("lambda_re")?, p.real("lambda_im")?);
    let imag = p.int("imag")? != 0;
    let h = 1.0 / a;
    let f = (h - 1.0).sqrt();
    let exact = ExpPoly::constant(crate::algebra::Coeff::from_rat(rational(a)?));
    let chain = extended_reduction_chain(lambda, &exact, &c, (0.0, 1.0))?;
    let index = index as usize;
    Ok(Solution::barotropic("appendix_chain", move |t, x, y| {
        let v = chain.eval(index, x - f * y, t / h)?;
        let part = if imag { v.im } else { v.re };
        Ok((0.0, part / h))
    }))
}

fn rational(v: f64) -> Result<crate::algebra::Rat> {
    crate::algebra::exppoly::parse_decimal(&format!("{v}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// RK4 of `L φᵏ + 2λφᵏ⁻¹_q + φᵏ⁻¹ + φᵏ⁻²_q = 0` for constant `A`.
    fn integrate(lambda: f64, a: f64, c: &[f64], q: f64) -> Vec<f64> {
        let den = lambda * lambda - 2.0 * a;
        let m = c.len();
        let steps = 4000;
        let out = rk4(c.to_vec(), 0.0, q, steps, |_, phi: &[f64]| {
            let mut d = vec![0.0; m];
            for k in 0..m {
                let mut src = lambda * phi[k];
                if k >= 1 {
                    src += 2.0 * lambda * d[k - 1] + phi[k - 1];
                }
                if k >= 2 {
                    src += d[k - 2];
                }
                d[k] = -src / den;
            }
            d
        });
        out.last().unwrap().clone()
    }

    #[test]
    fn closed_form_matches_integration() {
        let chain = extended_reduction_chain(C::new(1.0, 0.0), &ExpPoly::one(), &[1.0, 1.0, 1.0], (0.0, 1.0)).unwrap();
        for q in [0.25, 0.5, 1.0] {
            let reference = integrate(1.0, 1.0, &[1.0, 1.0, 1.0], q);
            for (k, r) in reference.iter().enumerate() {
                let (phi, _) = chain.profile(k + 1, q).unwrap();
                assert!((phi.re - r).abs() < 1e-10 && phi.im.abs() < 1e-14, "k={k} q={q}");
            }
        }
    }

    #[test]
    fn first_member_is_a_plain_exponential() {
        // ζ = −λq/(2A − λ²) = −q, φ¹ = e^{q}
        let chain = extended_reduction_chain(C::new(1.0, 0.0), &ExpPoly::one(), &[2.0], (0.0, 1.0)).unwrap();
        let v = chain.eval(1, 0.3, 0.7).unwrap();
        assert!((v.re - 2.0 * (0.3f64 + 0.7).exp()).abs() < 1e-13);
        assert!(chain.eval(2, 0.0, 0.0).is_err());
    }

    #[test]
    fn resonant_eigenvalue_is_singular() {
        let two: ExpPoly = "2".parse().unwrap();
        let r = extended_reduction_chain(C::new(2.0, 0.0), &two, &[1.0], (0.0, 1.0));
        assert!(matches!(r, Err(Error::Singular(_))));
        let a: ExpPoly = "1 + t".parse().unwrap();
        let r = extended_reduction_chain(C::new(2.0, 0.0), &a, &[1.0], (0.0, 2.0));
        assert!(matches!(r, Err(Error::Singular(_))));
    }

    #[test]
    fn tabulated_profile_stays_in_range() {
        let a: ExpPoly = "1 + t/4".parse().unwrap();
        let chain = extended_reduction_chain(C::new(0.5, 0.0), &a, &[1.0, 0.0], (0.0, 1.0)).unwrap();
        assert_eq!(chain.len(), 2);
        assert!(chain.profile(1, 0.5).is_ok());
        assert!(chain.profile(1, 1.5).is_err());
    }
}
