use std::fmt;

use crate::algebra::ExpPoly;
use crate::algebra::coeff::rat_to_f64;

/// Relative size below which a coefficient counts as zero in shape tests.
const SHAPE_TOL: f64 = 1e-12;

/// Real function of time: `Σ p_σ(t) e^{σt} + Σ A sin(ωt + φ)` with
/// floating-point data.
///
/// Closed under sums, scaling, differentiation and affine changes of the
/// argument, which is everything the transformation group needs.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct TimeFn {
    /// `(σ, coefficients by ascending degree)`, sorted by `σ`.
    exp: Vec<(f64, Vec<f64>)>,
    /// `(A, ω, φ)`
    trig: Vec<(f64, f64, f64)>,
}

impl TimeFn {
    pub fn zero() -> Self {
        TimeFn::default()
    }

    pub fn constant(c: f64) -> Self {
        TimeFn::polynomial(&[c])
    }

    /// `Σ c_k t^k`
    pub fn polynomial(c: &[f64]) -> Self {
        let mut f = TimeFn::zero();
        f.add_block(0.0, c);
        f
    }

    /// `c · t`
    pub fn linear(c: f64) -> Self {
        TimeFn::polynomial(&[0.0, c])
    }

    /// `A sin(ωt + φ)`
    pub fn sine(amp: f64, omega: f64, phase: f64) -> Self {
        TimeFn { exp: vec![], trig: vec![(amp, omega, phase)] }
    }

    pub fn from_exppoly(p: &ExpPoly) -> Self {
        let mut f = TimeFn::zero();
        for (sigma, coeffs) in p.blocks() {
            let c: Vec<f64> = coeffs.iter().map(|c| c.to_f64()).collect();
            f.add_block(rat_to_f64(sigma), &c);
        }
        f
    }

    fn add_block(&mut self, sigma: f64, c: &[f64]) {
        match self.exp.iter_mut().find(|(s, _)| *s == sigma) {
            Some((_, v)) => {
                if v.len() < c.len() {
                    v.resize(c.len(), 0.0);
                }
                for (a, b) in v.iter_mut().zip(c) {
                    *a += b;
                }
            }
            None => {
                self.exp.push((sigma, c.to_vec()));
                self.exp.sort_by(|a, b| a.0.total_cmp(&b.0));
            }
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let e: f64 = self
            .exp
            .iter()
            .map(|(s, c)| c.iter().rev().fold(0.0, |acc, a| acc * t + a) * (s * t).exp())
            .sum();
        let s: f64 = self.trig.iter().map(|(a, w, p)| a * (w * t + p).sin()).sum();
        e + s
    }

    pub fn derivative(&self) -> TimeFn {
        let mut out = TimeFn::zero();
        for (s, c) in &self.exp {
            let mut d: Vec<f64> = c.iter().map(|a| s * a).collect();
            for k in 1..c.len() {
                d[k - 1] += k as f64 * c[k];
            }
            out.add_block(*s, &d);
        }
        out.trig = self
            .trig
            .iter()
            .map(|(a, w, p)| (a * w, *w, p + std::f64::consts::FRAC_PI_2))
            .collect();
        out
    }

    pub fn scale(&self, k: f64) -> TimeFn {
        TimeFn {
            exp: self
                .exp
                .iter()
                .map(|(s, c)| (*s, c.iter().map(|a| k * a).collect()))
                .collect(),
            trig: self.trig.iter().map(|(a, w, p)| (k * a, *w, *p)).collect(),
        }
    }

    pub fn add(&self, other: &TimeFn) -> TimeFn {
        let mut out = self.clone();
        for (s, c) in &other.exp {
            out.add_block(*s, c);
        }
        out.trig.extend(other.trig.iter().copied());
        out
    }

    /// `t ↦ self(s·t + d)`
    pub fn affine_arg(&self, s: f64, d: f64) -> TimeFn {
        let mut out = TimeFn::zero();
        for (sigma, c) in &self.exp {
            let mut w = vec![0.0; c.len()];
            for (k, a) in c.iter().enumerate() {
                // (s t + d)^k = Σ_j C(k,j) s^j d^{k−j} t^j
                let mut binom = 1.0;
                for (j, wj) in w.iter_mut().enumerate().take(k + 1) {
                    *wj += a * binom * s.powi(j as i32) * d.powi((k - j) as i32);
                    binom = binom * (k - j) as f64 / (j + 1) as f64;
                }
            }
            let factor = (sigma * d).exp();
            w.iter_mut().for_each(|x| *x *= factor);
            out.add_block(sigma * s, &w);
        }
        out.trig = self.trig.iter().map(|(a, w, p)| (*a, w * s, w * d + p)).collect();
        out
    }

    fn magnitude(&self) -> f64 {
        let e = self.exp.iter().flat_map(|(_, c)| c.iter()).fold(0.0f64, |m, a| m.max(a.abs()));
        self.trig.iter().fold(e, |m, (a, _, _)| m.max(a.abs())).max(1.0)
    }

    fn negligible(&self, x: f64) -> bool {
        x.abs() <= SHAPE_TOL * self.magnitude()
    }

    /// Whether the second derivative vanishes identically.
    pub fn is_affine(&self) -> bool {
        self.derivative().derivative().is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.derivative().is_zero()
    }

    pub fn is_zero(&self) -> bool {
        // sines of equal |ω| may cancel, so compare them as phasors
        let mut constant = 0.0;
        let mut phasors: Vec<(f64, f64, f64)> = Vec::new();
        for &(a, w, p) in &self.trig {
            if w == 0.0 {
                constant += a * p.sin();
                continue;
            }
            // sin(−|ω|t + φ) = −sin(|ω|t − φ)
            let (w, a, p) = if w < 0.0 { (-w, -a, -p) } else { (w, a, p) };
            match phasors.iter_mut().find(|e| e.0 == w) {
                Some(e) => {
                    e.1 += a * p.cos();
                    e.2 += a * p.sin();
                }
                None => phasors.push((w, a * p.cos(), a * p.sin())),
            }
        }
        let exp_zero = self.exp.iter().all(|(s, c)| {
            c.iter().enumerate().all(|(k, &a)| {
                let a = if *s == 0.0 && k == 0 { a + constant } else { a };
                self.negligible(a)
            })
        });
        let no_poly = !self.exp.iter().any(|(s, _)| *s == 0.0);
        exp_zero
            && (!no_poly || self.negligible(constant))
            && phasors.iter().all(|e| self.negligible(e.1) && self.negligible(e.2))
    }
}

impl From<&ExpPoly> for TimeFn {
    fn from(p: &ExpPoly) -> Self {
        TimeFn::from_exppoly(p)
    }
}

impl fmt::Display for TimeFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (s, c) in &self.exp {
            let poly: Vec<String> = c
                .iter()
                .enumerate()
                .filter(|(_, a)| **a != 0.0)
                .map(|(k, a)| match k {
                    0 => format!("{a}"),
                    1 => format!("{a}*t"),
                    _ => format!("{a}*t^{k}"),
                })
                .collect();
            if poly.is_empty() {
                continue;
            }
            let poly = poly.join(" + ");
            if *s == 0.0 {
                parts.push(poly);
            } else {
                parts.push(format!("({poly})exp({s} t)"));
            }
        }
        for (a, w, p) in &self.trig {
            parts.push(format!("{a}*sin({w} t + {p})"));
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12 * (1.0 + a.abs())
    }

    #[test]
    fn matches_exact_form() {
        let p: ExpPoly = "(3 + 2t^2)exp(1/2 t) - t".parse().unwrap();
        let f = TimeFn::from(&p);
        for t in [-1.0, 0.0, 0.3, 2.0] {
            assert!(close(f.eval(t), p.eval(t)));
            assert!(close(f.derivative().eval(t), p.derivative().eval(t)));
        }
    }

    #[test]
    fn affine_argument() {
        let f = TimeFn::from(&"t^3 exp(-t)".parse::<ExpPoly>().unwrap()).add(&TimeFn::sine(2.0, 3.0, 0.1));
        let g = f.affine_arg(-1.0, 0.7);
        for t in [-0.5, 0.0, 1.2] {
            assert!(close(g.eval(t), f.eval(-t + 0.7)));
        }
    }

    #[test]
    fn shape_predicates() {
        assert!(TimeFn::linear(2.0).is_affine());
        assert!(!TimeFn::polynomial(&[0.0, 0.0, 1.0]).is_affine());
        assert!(TimeFn::constant(3.0).is_constant());
        assert!(!TimeFn::sine(1.0, 1.0, 0.0).is_affine());
        let cancel = TimeFn::sine(1.0, 2.0, 0.0).add(&TimeFn::sine(1.0, 2.0, std::f64::consts::PI));
        assert!(cancel.is_zero());
        let f = TimeFn::polynomial(&[1.0, 2.0, 3.0]);
        assert!(f.add(&f.scale(-1.0)).is_zero());
    }
}
