use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

use super::coeff::{fmt_rat, rat_int, rat_to_f64, Coeff, Rat};

/// Exact function `Σ_σ p_σ(t) e^{σt}` with rational `σ` and polynomial
/// coefficients in [`Coeff`].
///
/// Stored canonically: exponents sorted, coefficient vectors trimmed, no
/// zero blocks, so structural equality is mathematical equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ExpPoly {
    terms: BTreeMap<Rat, Vec<Coeff>>,
}

fn trim(p: &mut Vec<Coeff>) {
    while p.last().is_some_and(Coeff::is_zero) {
        p.pop();
    }
}

fn binomial(n: usize, k: usize) -> Rat {
    let mut r = Rat::one();
    for i in 0..k {
        r = r * rat_int((n - i) as i64) / rat_int((i + 1) as i64);
    }
    r
}

impl ExpPoly {
    pub fn zero() -> Self {
        ExpPoly::default()
    }

    pub fn one() -> Self {
        ExpPoly::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Self {
        ExpPoly::monomial(c, 0, Rat::zero())
    }

    pub fn from_rat(r: Rat) -> Self {
        ExpPoly::constant(Coeff::from_rat(r))
    }

    pub fn from_int(n: i64) -> Self {
        ExpPoly::from_rat(rat_int(n))
    }

    /// The identity function `t`.
    pub fn t() -> Self {
        ExpPoly::monomial(Coeff::one(), 1, Rat::zero())
    }

    /// `e^{σt}`
    pub fn exp(sigma: Rat) -> Self {
        ExpPoly::monomial(Coeff::one(), 0, sigma)
    }

    /// `c · t^k · e^{σt}`
    pub fn monomial(c: Coeff, k: usize, sigma: Rat) -> Self {
        let mut p = ExpPoly::zero();
        if !c.is_zero() {
            let mut v = vec![Coeff::zero(); k + 1];
            v[k] = c;
            p.terms.insert(sigma, v);
        }
        p
    }

    /// Builds from `(σ, coefficients by ascending degree)` blocks.
    pub fn from_blocks(blocks: impl IntoIterator<Item = (Rat, Vec<Coeff>)>) -> Self {
        let mut p = ExpPoly::zero();
        for (sigma, coeffs) in blocks {
            p.add_block(sigma, &coeffs);
        }
        p
    }

    fn add_block(&mut self, sigma: Rat, coeffs: &[Coeff]) {
        let e = self.terms.entry(sigma.clone()).or_default();
        if e.len() < coeffs.len() {
            e.resize(coeffs.len(), Coeff::zero());
        }
        for (k, c) in coeffs.iter().enumerate() {
            e[k] = &e[k] + c;
        }
        trim(e);
        if e.is_empty() {
            self.terms.remove(&sigma);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Blocks `(σ, coefficients by ascending degree)` in increasing `σ`.
    pub fn blocks(&self) -> impl Iterator<Item = (&Rat, &[Coeff])> {
        self.terms.iter().map(|(s, v)| (s, v.as_slice()))
    }

    /// Coefficient of `t^k e^{σt}`.
    pub fn coefficient(&self, sigma: &Rat, k: usize) -> Coeff {
        self.terms
            .get(sigma)
            .and_then(|v| v.get(k))
            .cloned()
            .unwrap_or_default()
    }

    /// The value when `self` is a constant function.
    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(Coeff::zero()),
            1 => match self.terms.get(&Rat::zero()) {
                Some(v) if v.len() == 1 => Some(v[0].clone()),
                _ => None,
            },
            _ => None,
        }
    }

    /// Whether no exponential factor appears.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(Zero::is_zero)
    }

    /// Largest polynomial degree over all blocks, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.terms.values().map(|v| v.len() - 1).max()
    }

    pub fn scale(&self, s: &Coeff) -> ExpPoly {
        if s.is_zero() {
            return ExpPoly::zero();
        }
        let mut out = ExpPoly::zero();
        for (sigma, v) in &self.terms {
            let scaled: Vec<Coeff> = v.iter().map(|c| c * s).collect();
            out.add_block(sigma.clone(), &scaled);
        }
        out
    }

    pub fn scale_rat(&self, s: &Rat) -> ExpPoly {
        self.scale(&Coeff::from_rat(s.clone()))
    }

    pub fn derivative(&self) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for (sigma, v) in &self.terms {
            // (p e^{σt})' = (p' + σ p) e^{σt}
            let mut d: Vec<Coeff> = v.iter().map(|c| c.scale(sigma)).collect();
            for k in 1..v.len() {
                d[k - 1] = &d[k - 1] + &v[k].scale(&rat_int(k as i64));
            }
            out.add_block(sigma.clone(), &d);
        }
        out
    }

    pub fn nth_derivative(&self, n: usize) -> ExpPoly {
        (0..n).fold(self.clone(), |acc, _| acc.derivative())
    }

    /// Antiderivative with no constant term added.
    ///
    /// For `σ ≠ 0` uses `∫ p e^{σt} = e^{σt} Σ_k (−1)^k p^{(k)} / σ^{k+1}`.
    pub fn antiderivative(&self) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for (sigma, v) in &self.terms {
            if sigma.is_zero() {
                let mut w = vec![Coeff::zero(); v.len() + 1];
                for (k, c) in v.iter().enumerate() {
                    w[k + 1] = c.scale(&(Rat::one() / rat_int(k as i64 + 1)));
                }
                out.add_block(Rat::zero(), &w);
            } else {
                let mut p = v.clone();
                let inv = Rat::one() / sigma;
                let mut factor = inv.clone();
                let mut acc = vec![Coeff::zero(); v.len()];
                while !p.is_empty() {
                    for (k, c) in p.iter().enumerate() {
                        acc[k] = &acc[k] + &c.scale(&factor);
                    }
                    p = poly_derivative(&p);
                    factor = -factor * &inv;
                }
                out.add_block(sigma.clone(), &acc);
            }
        }
        out
    }

    /// `∫_a^t self(s) ds`
    pub fn integral_from(&self, a: &Rat) -> ExpPoly {
        let anti = self.antiderivative();
        let at_a = anti.eval_exact(a);
        &anti - &ExpPoly::constant(at_a)
    }

    /// Exact value at a rational point.
    pub fn eval_exact(&self, t: &Rat) -> Coeff {
        let mut total = Coeff::zero();
        for (sigma, v) in &self.terms {
            let mut poly = Coeff::zero();
            for c in v.iter().rev() {
                poly = &(&poly * &Coeff::from_rat(t.clone())) + c;
            }
            total = &total + &(&poly * &Coeff::exp(sigma * t));
        }
        total
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|(sigma, v)| {
                let p = v.iter().rev().fold(0.0, |acc, c| acc * t + c.to_f64());
                p * (rat_to_f64(sigma) * t).exp()
            })
            .sum()
    }

    /// `t ↦ self(t − ε)`
    pub fn shift(&self, eps: &Rat) -> ExpPoly {
        self.affine(&Rat::one(), &(-eps))
    }

    /// `t ↦ self(s·t + d)`
    pub fn affine(&self, s: &Rat, d: &Rat) -> ExpPoly {
        let mut out = ExpPoly::zero();
        if s.is_zero() {
            return ExpPoly::constant(self.eval_exact(d));
        }
        for (sigma, v) in &self.terms {
            let mut w = vec![Coeff::zero(); v.len()];
            for (k, c) in v.iter().enumerate() {
                // (s t + d)^k = Σ_j C(k,j) s^j d^{k−j} t^j
                for (j, wj) in w.iter_mut().enumerate().take(k + 1) {
                    let b = binomial(k, j) * pow(s, j) * pow(d, k - j);
                    *wj = &*wj + &c.scale(&b);
                }
            }
            let factor = Coeff::exp(sigma * d);
            let w: Vec<Coeff> = w.iter().map(|c| c * &factor).collect();
            out.add_block(sigma * s, &w);
        }
        out
    }
}

fn pow(r: &Rat, n: usize) -> Rat {
    (0..n).fold(Rat::one(), |acc, _| acc * r)
}

fn poly_derivative(p: &[Coeff]) -> Vec<Coeff> {
    let mut d: Vec<Coeff> = (1..p.len())
        .map(|k| p[k].scale(&rat_int(k as i64)))
        .collect();
    trim(&mut d);
    d
}

impl Add for &ExpPoly {
    type Output = ExpPoly;
    fn add(self, o: &ExpPoly) -> ExpPoly {
        let mut out = self.clone();
        for (sigma, v) in &o.terms {
            out.add_block(sigma.clone(), v);
        }
        out
    }
}

impl Neg for &ExpPoly {
    type Output = ExpPoly;
    fn neg(self) -> ExpPoly {
        self.scale(&Coeff::from_int(-1))
    }
}

impl Sub for &ExpPoly {
    type Output = ExpPoly;
    fn sub(self, o: &ExpPoly) -> ExpPoly {
        self + &(-o)
    }
}

impl Mul for &ExpPoly {
    type Output = ExpPoly;
    fn mul(self, o: &ExpPoly) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for (s1, v1) in &self.terms {
            for (s2, v2) in &o.terms {
                let mut w = vec![Coeff::zero(); v1.len() + v2.len() - 1];
                for (i, a) in v1.iter().enumerate() {
                    for (j, b) in v2.iter().enumerate() {
                        w[i + j] = &w[i + j] + &(a * b);
                    }
                }
                out.add_block(s1 + s2, &w);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for ExpPoly {
            type Output = ExpPoly;
            fn $m(self, o: ExpPoly) -> ExpPoly {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for ExpPoly {
    type Output = ExpPoly;
    fn neg(self) -> ExpPoly {
        -&self
    }
}

fn fmt_poly(v: &[Coeff]) -> String {
    let mut s = String::new();
    for (k, c) in v.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let neg_rat = c.as_rat().filter(|r| r.is_negative());
        let (sep, c) = match (&neg_rat, s.is_empty()) {
            (Some(r), false) => (" - ", Coeff::from_rat(-r)),
            (_, false) => (" + ", c.clone()),
            (_, true) => ("", c.clone()),
        };
        s.push_str(sep);
        let mono = match k {
            0 => String::new(),
            1 => "t".to_string(),
            _ => format!("t^{k}"),
        };
        if k == 0 {
            s.push_str(&c.factor_string());
        } else if c.is_one() {
            s.push_str(&mono);
        } else if c.as_rat().is_some_and(|r| r == -Rat::one()) {
            s.push('-');
            s.push_str(&mono);
        } else {
            s.push_str(&format!("{}*{mono}", c.factor_string()));
        }
    }
    s
}

impl fmt::Display for ExpPoly {
    /// `3 - t^2 + (t)exp(1/2 t)`: one block per exponent, increasing.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (sigma, v)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            let poly = fmt_poly(v);
            if sigma.is_zero() {
                if self.terms.len() > 1 {
                    write!(f, "({poly})")?;
                } else {
                    f.write_str(&poly)?;
                }
            } else {
                let arg = if sigma.is_one() {
                    "t".to_string()
                } else if *sigma == -Rat::one() {
                    "-t".to_string()
                } else {
                    format!("{} t", fmt_rat(sigma))
                };
                write!(f, "({poly})exp({arg})")?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rat),
    Ident(String),
    Sym(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Tok::Num(parse_decimal(&text)?));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}` in `{s}`")));
        }
    }
    Ok(out)
}

/// Exact rational value of a plain decimal literal like `12` or `0.25`.
pub(crate) fn parse_decimal(text: &str) -> Result<Rat> {
    let bad = || Error::Parse(format!("bad number `{text}`"));
    let (int, frac) = match text.split_once('.') {
        Some((a, b)) => (a, b),
        None => (text, ""),
    };
    if (int.is_empty() && frac.is_empty()) || frac.contains('.') {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let n: num_bigint::BigInt = digits.parse().map_err(|_| bad())?;
    let d = num_bigint::BigInt::from(10u32).pow(frac.len() as u32);
    Ok(Rat::new(n, d))
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} in `{}`", self.src))
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{c}`")))
        }
    }

    fn sum(&mut self) -> Result<ExpPoly> {
        let mut acc = if self.eat('-') {
            -self.product()?
        } else {
            self.eat('+');
            self.product()?
        };
        loop {
            if self.eat('+') {
                acc = &acc + &self.product()?;
            } else if self.eat('-') {
                acc = &acc - &self.product()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Some(Tok::Num(_) | Tok::Ident(_) | Tok::Sym('(')))
    }

    fn product(&mut self) -> Result<ExpPoly> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.power()?;
            } else if self.eat('/') {
                let d = self.power()?;
                let d = d
                    .as_constant()
                    .and_then(|c| c.as_rat())
                    .filter(|r| !r.is_zero())
                    .ok_or_else(|| self.err("division only by a nonzero rational"))?;
                acc = acc.scale_rat(&(Rat::one() / d));
            } else if self.starts_atom() {
                acc = &acc * &self.power()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<ExpPoly> {
        if self.eat('-') {
            return Ok(-self.power()?);
        }
        let base = self.atom()?;
        if self.eat('^') {
            let n = match self.peek() {
                Some(Tok::Num(r)) if r.is_integer() && !r.is_negative() => r.to_integer(),
                _ => return Err(self.err("exponent must be a nonnegative integer")),
            };
            self.pos += 1;
            let n: usize = n.try_into().map_err(|_| self.err("exponent too large"))?;
            return Ok((0..n).fold(ExpPoly::one(), |acc, _| &acc * &base));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExpPoly> {
        match self.peek().cloned() {
            Some(Tok::Num(r)) => {
                self.pos += 1;
                Ok(ExpPoly::from_rat(r))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(id)) => {
                self.pos += 1;
                match id.as_str() {
                    "t" => Ok(ExpPoly::t()),
                    "exp" => {
                        self.expect('(')?;
                        let arg = self.sum()?;
                        self.expect(')')?;
                        self.exp_of(&arg)
                    }
                    "E" => {
                        self.expect('(')?;
                        let arg = self.sum()?;
                        self.expect(')')?;
                        let r = arg
                            .as_constant()
                            .and_then(|c| c.as_rat())
                            .ok_or_else(|| self.err("E(...) needs a rational argument"))?;
                        Ok(ExpPoly::constant(Coeff::exp(r)))
                    }
                    other => Err(self.err(&format!("unknown name `{other}`"))),
                }
            }
            _ => Err(self.err("unexpected end of expression")),
        }
    }

    /// `exp(a + b t)` for rational `a`, `b`.
    fn exp_of(&self, arg: &ExpPoly) -> Result<ExpPoly> {
        let bad = || self.err("exp(...) needs an argument of the form a + b t with rational a, b");
        if !arg.is_polynomial() || arg.degree().unwrap_or(0) > 1 {
            return Err(bad());
        }
        let zero = Rat::zero();
        let a = arg.coefficient(&zero, 0).as_rat().ok_or_else(bad)?;
        let b = arg.coefficient(&zero, 1).as_rat().ok_or_else(bad)?;
        Ok(ExpPoly::monomial(Coeff::exp(a), 0, b))
    }
}

impl FromStr for ExpPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let toks = tokenize(s)?;
        if toks.is_empty() {
            return Err(Error::Parse("empty expression".into()));
        }
        let mut p = Parser { toks: &toks, pos: 0, src: s };
        let e = p.sum()?;
        if p.pos != toks.len() {
            return Err(p.err("trailing input"));
        }
        Ok(e)
    }
}

#[cfg(test)]
pub(crate) mod strategies {
    use super::*;
    use crate::algebra::coeff::rat;
    use proptest::prelude::*;

    pub fn small_rat() -> impl Strategy<Value = Rat> {
        (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
    }

    pub fn sigma() -> impl Strategy<Value = Rat> {
        prop_oneof![Just(rat(0, 1)), Just(rat(1, 1)), Just(rat(-1, 2)), Just(rat(2, 1)), Just(rat(1, 3))]
    }

    /// Rational-coefficient exp-polys of degree ≤ 4 over a few exponents.
    pub fn exppoly() -> impl Strategy<Value = ExpPoly> {
        proptest::collection::vec((sigma(), 0usize..=4, small_rat()), 0..4).prop_map(|ts| {
            ts.into_iter().fold(ExpPoly::zero(), |acc, (s, k, c)| {
                &acc + &ExpPoly::monomial(Coeff::from_rat(c), k, s)
            })
        })
    }

    /// Adds symbolic exponential constants to the coefficients.
    pub fn exppoly_with_e() -> impl Strategy<Value = ExpPoly> {
        (exppoly(), small_rat(), small_rat()).prop_map(|(p, c, r)| {
            &p + &p.scale(&Coeff::term(c, r))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::strategies::*;
    use super::*;
    use crate::algebra::coeff::rat;
    use proptest::prelude::*;

    fn ep(s: &str) -> ExpPoly {
        s.parse().unwrap()
    }

    #[test]
    fn parses_documented_form() {
        let p = ep("(3+2t^2)exp(1/2 t)");
        assert_eq!(p.coefficient(&rat(1, 2), 0), Coeff::from_int(3));
        assert_eq!(p.coefficient(&rat(1, 2), 2), Coeff::from_int(2));
        assert_eq!(p.to_string(), "(3 + 2*t^2)exp(1/2 t)");
    }

    #[test]
    fn derivative_of_square() {
        assert_eq!(ep("t^2").derivative(), ep("2t"));
        assert_eq!(ep("t exp(2t)").derivative(), ep("(1 + 2t)exp(2 t)"));
    }

    #[test]
    fn shift_introduces_exact_constants() {
        // e^{2(t−1)} = e^{−2} e^{2t}
        assert_eq!(ep("exp(2t)").shift(&rat(1, 1)), ep("E(-2) exp(2t)"));
        assert_eq!(ep("t").shift(&rat(1, 1)), ep("t - 1"));
    }

    #[test]
    fn antiderivative_of_t_exp() {
        let p = ep("t exp(2t)");
        assert_eq!(p.antiderivative().derivative(), p);
        assert_eq!(p.antiderivative(), ep("(t/2 - 1/4) exp(2t)"));
    }

    #[test]
    fn definite_integral_vanishes_at_start() {
        let p = ep("(1 + t) exp(t) + 3t^2");
        let i = p.integral_from(&rat(1, 2));
        assert!(i.eval_exact(&rat(1, 2)).is_zero());
        assert_eq!(i.derivative(), p);
    }

    #[test]
    fn numeric_evaluation() {
        let p = ep("(3 + 2t^2)exp(1/2 t) - t");
        let t = 0.7f64;
        let want = (3.0 + 2.0 * t * t) * (0.5 * t).exp() - t;
        assert!((p.eval(t) - want).abs() < 1e-14);
    }

    #[test]
    fn parse_errors() {
        for bad in ["", "t^", "exp(t^2)", "(t", "1/t", "x", "t^-1"] {
            assert!(bad.parse::<ExpPoly>().is_err(), "{bad}");
        }
    }

    proptest! {
        #[test]
        fn display_round_trips(p in exppoly_with_e()) {
            let back: ExpPoly = p.to_string().parse().unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn leibniz_rule(a in exppoly(), b in exppoly()) {
            prop_assert_eq!((&a * &b).derivative(), &(&a.derivative() * &b) + &(&a * &b.derivative()));
        }

        #[test]
        fn antiderivative_inverts_derivative(p in exppoly_with_e()) {
            prop_assert_eq!(p.antiderivative().derivative(), p);
        }

        #[test]
        fn shifts_compose(p in exppoly(), a in small_rat(), b in small_rat()) {
            prop_assert_eq!(p.shift(&a).shift(&b), p.shift(&(&a + &b)));
        }

        #[test]
        fn exact_and_float_evaluation_agree(p in exppoly_with_e(), t in small_rat()) {
            let exact = p.eval_exact(&t).to_f64();
            let approx = p.eval(rat_to_f64(&t));
            prop_assert!((exact - approx).abs() <= 1e-9 * (1.0 + exact.abs()));
        }
    }
}
