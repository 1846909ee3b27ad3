use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

use super::coeff::{rat_int, Coeff, Rat};
use super::exppoly::ExpPoly;

/// `a ∂t + b ∂y + X(f) + c F + Z(g)`.
///
/// `X(f) = f ∂x − f′ y (∂ψ¹ + ∂ψ²)`, `F = ∂ψ¹ − ∂ψ²`, `Z(g) = g (∂ψ¹ + ∂ψ²)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct AlgebraElement {
    pub a: Coeff,
    pub b: Coeff,
    pub f: ExpPoly,
    pub c: Coeff,
    pub g: ExpPoly,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        AlgebraElement::default()
    }

    pub fn dt() -> Self {
        AlgebraElement { a: Coeff::one(), ..Default::default() }
    }

    pub fn dy() -> Self {
        AlgebraElement { b: Coeff::one(), ..Default::default() }
    }

    pub fn x(f: ExpPoly) -> Self {
        AlgebraElement { f, ..Default::default() }
    }

    pub fn froude_shift() -> Self {
        AlgebraElement { c: Coeff::one(), ..Default::default() }
    }

    pub fn z(g: ExpPoly) -> Self {
        AlgebraElement { g, ..Default::default() }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.f.is_zero() && self.c.is_zero() && self.g.is_zero()
    }

    pub fn scale(&self, s: &Coeff) -> Self {
        AlgebraElement {
            a: &self.a * s,
            b: &self.b * s,
            f: self.f.scale(s),
            c: &self.c * s,
            g: self.g.scale(s),
        }
    }

    pub fn scale_rat(&self, s: &Rat) -> Self {
        self.scale(&Coeff::from_rat(s.clone()))
    }

    /// Linear coordinates: `a`, `b`, `c`, then every `(σ, k)` coefficient of
    /// `f` and of `g` present in either element.
    pub(crate) fn coordinates(elems: &[&AlgebraElement]) -> Vec<Vec<Coeff>> {
        let mut keys_f = std::collections::BTreeSet::new();
        let mut keys_g = std::collections::BTreeSet::new();
        for e in elems {
            for (s, v) in e.f.blocks() {
                for k in 0..v.len() {
                    keys_f.insert((s.clone(), k));
                }
            }
            for (s, v) in e.g.blocks() {
                for k in 0..v.len() {
                    keys_g.insert((s.clone(), k));
                }
            }
        }
        elems
            .iter()
            .map(|e| {
                let mut v = vec![e.a.clone(), e.b.clone(), e.c.clone()];
                v.extend(keys_f.iter().map(|(s, k)| e.f.coefficient(s, *k)));
                v.extend(keys_g.iter().map(|(s, k)| e.g.coefficient(s, *k)));
                v
            })
            .collect()
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, o: &AlgebraElement) -> AlgebraElement {
        AlgebraElement {
            a: &self.a + &o.a,
            b: &self.b + &o.b,
            f: &self.f + &o.f,
            c: &self.c + &o.c,
            g: &self.g + &o.g,
        }
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.scale(&Coeff::from_int(-1))
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, o: &AlgebraElement) -> AlgebraElement {
        self + &(-o)
    }
}

/// Lie bracket from `[∂t, X(f)] = X(f′)`, `[∂t, Z(g)] = Z(g′)`,
/// `[∂y, X(f)] = −Z(f′)`; all other basis brackets vanish.
pub fn commutator(u: &AlgebraElement, v: &AlgebraElement) -> AlgebraElement {
    let (fu, fv) = (u.f.derivative(), v.f.derivative());
    let (gu, gv) = (u.g.derivative(), v.g.derivative());
    let x = &fv.scale(&u.a) - &fu.scale(&v.a);
    let z = &(&gv.scale(&u.a) - &gu.scale(&v.a)) - &(&fv.scale(&u.b) - &fu.scale(&v.b));
    AlgebraElement { f: x, g: z, ..Default::default() }
}

/// `Ad(e^{εA}) B = Σ_k (−ε)^k / k! · ad_A^k B`.
///
/// The sign convention reproduces `Ad(e^{ε∂t}) X(f) = X(f(t − ε))`.
/// When `A` has no `∂t` part the series stops after two terms. When `A` is
/// `a ∂t + b ∂y + c F` it is summed in closed form as an argument shift.
pub fn adjoint(a: &AlgebraElement, eps: &Rat, target: &AlgebraElement) -> Result<AlgebraElement> {
    if a.a.is_zero() {
        let mut term = target.clone();
        let mut out = target.clone();
        let mut factor = Rat::one();
        for k in 1.. {
            term = commutator(a, &term);
            if term.is_zero() {
                return Ok(out);
            }
            if k > 3 {
                break;
            }
            factor = factor * (-eps) / rat_int(k);
            out = &out + &term.scale_rat(&factor);
        }
        return Err(Error::NonTerminating(format!("ad-series of {a} on {target}")));
    }
    if a.f.is_zero() && a.g.is_zero() {
        let shift_a = a.a.as_rat();
        let shift_b = a.b.as_rat();
        if let (Some(sa), Some(sb)) = (shift_a, shift_b) {
            // exp(−ε(aD + N)) with N(f, g) = (0, −b f′)
            let s = &sa * eps;
            let f = target.f.shift(&s);
            let g = &target.g.shift(&s) + &target.f.derivative().shift(&s).scale_rat(&(&sb * eps));
            return Ok(AlgebraElement { f, g, ..target.clone() });
        }
    }
    Err(Error::NonTerminating(format!(
        "Ad(exp(eps*({a}))) needs an exact time shift with rational coefficients and no X, Z part"
    )))
}

/// Named subspaces used in the structure analysis of the algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subspace {
    /// `𝔤′ = ⟨X(f), Z(g)⟩`
    Derived,
    /// `𝔫 = ⟨∂y, X(f), F, Z(g)⟩`
    Nilradical,
    /// `𝔫′ = ⟨Z(g)⟩`
    NilDerived,
    /// `𝔷 = ⟨X(1), F, Z(1)⟩`
    Center,
    CenterDerived,
    CenterNilDerived,
}

impl Subspace {
    pub const ALL: [Subspace; 6] = [
        Subspace::Derived,
        Subspace::Nilradical,
        Subspace::NilDerived,
        Subspace::Center,
        Subspace::CenterDerived,
        Subspace::CenterNilDerived,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Subspace::Derived => "g'",
            Subspace::Nilradical => "n",
            Subspace::NilDerived => "n'",
            Subspace::Center => "z",
            Subspace::CenterDerived => "z & g'",
            Subspace::CenterNilDerived => "z & n'",
        }
    }

    pub fn generators(&self) -> &'static str {
        match self {
            Subspace::Derived => "X(f), Z(g)",
            Subspace::Nilradical => "Dy, X(f), F, Z(g)",
            Subspace::NilDerived => "Z(g)",
            Subspace::Center => "X(1), F, Z(1)",
            Subspace::CenterDerived => "X(1), Z(1)",
            Subspace::CenterNilDerived => "Z(1)",
        }
    }

    pub fn contains(&self, e: &AlgebraElement) -> bool {
        let constant = |p: &ExpPoly| p.as_constant().is_some();
        match self {
            Subspace::Derived => e.a.is_zero() && e.b.is_zero() && e.c.is_zero(),
            Subspace::Nilradical => e.a.is_zero(),
            Subspace::NilDerived => e.a.is_zero() && e.b.is_zero() && e.c.is_zero() && e.f.is_zero(),
            Subspace::Center => e.a.is_zero() && e.b.is_zero() && constant(&e.f) && constant(&e.g),
            Subspace::CenterDerived => {
                Subspace::Center.contains(e) && Subspace::Derived.contains(e)
            }
            Subspace::CenterNilDerived => {
                Subspace::Center.contains(e) && Subspace::NilDerived.contains(e)
            }
        }
    }
}

pub fn structure_subspaces() -> Vec<(&'static str, &'static str)> {
    Subspace::ALL.iter().map(|s| (s.name(), s.generators())).collect()
}

// ---------------------------------------------------------------------------
// Text form: `a*Dt + b*Dy + X(<exp-poly>) + c*F + Z(<exp-poly>)`

fn fmt_scalar_term(c: &Coeff, name: &str, first: bool) -> String {
    let neg = c.as_rat().is_some_and(|r| r.is_negative());
    let mag = if neg { -c } else { c.clone() };
    let sep = match (first, neg) {
        (true, true) => "-",
        (true, false) => "",
        (false, true) => " - ",
        (false, false) => " + ",
    };
    if mag.is_one() {
        format!("{sep}{name}")
    } else {
        format!("{sep}{}*{name}", mag.factor_string())
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = String::new();
        for (c, name) in [(&self.a, "Dt"), (&self.b, "Dy")] {
            if !c.is_zero() {
                parts += &fmt_scalar_term(c, name, parts.is_empty());
            }
        }
        if !self.f.is_zero() {
            parts += if parts.is_empty() { "" } else { " + " };
            parts += &format!("X({})", self.f);
        }
        if !self.c.is_zero() {
            parts += &fmt_scalar_term(&self.c, "F", parts.is_empty());
        }
        if !self.g.is_zero() {
            parts += if parts.is_empty() { "" } else { " + " };
            parts += &format!("Z({})", self.g);
        }
        if parts.is_empty() {
            parts.push('0');
        }
        f.write_str(&parts)
    }
}

/// Splits at top-level `+`/`-`, keeping the sign with each piece.
fn split_terms(s: &str) -> Result<Vec<(bool, String)>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut neg = false;
    for ch in s.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::Parse(format!("unbalanced `)` in `{s}`")));
                }
                cur.push(ch);
            }
            '+' | '-' if depth == 0 => {
                let trimmed = cur.trim();
                // a sign right after `*` belongs to the factor, e.g. `2*-Dt` is not allowed
                if !trimmed.is_empty() && !trimmed.ends_with('*') && !trimmed.ends_with('/') {
                    out.push((neg, trimmed.to_string()));
                    cur.clear();
                    neg = ch == '-';
                } else if trimmed.is_empty() {
                    if ch == '-' {
                        neg = !neg;
                    }
                } else {
                    cur.push(ch);
                }
            }
            _ => cur.push(ch),
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced `(` in `{s}`")));
    }
    let trimmed = cur.trim();
    if !trimmed.is_empty() {
        out.push((neg, trimmed.to_string()));
    } else if !out.is_empty() || neg {
        return Err(Error::Parse(format!("dangling sign in `{s}`")));
    }
    Ok(out)
}

/// `"3/2*Dt"` → `("3/2", "Dt")`, `"X(t)"` → `("", "X(t)")`.
fn split_generator(term: &str) -> (&str, &str) {
    let at = term
        .find(['X', 'Z'])
        .or_else(|| ["Dt", "Dy", "F"].iter().find_map(|g| term.strip_suffix(g).map(|h| h.len())))
        .unwrap_or(0);
    let head = term[..at].trim_end();
    let head = head.strip_suffix('*').unwrap_or(head).trim();
    (head, &term[at..])
}

fn parse_coeff(s: &str) -> Result<Coeff> {
    let p: ExpPoly = s.parse()?;
    p.as_constant()
        .ok_or_else(|| Error::Parse(format!("`{s}` is not a constant coefficient")))
}

impl FromStr for AlgebraElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty algebra element".into()));
        }
        let mut e = AlgebraElement::zero();
        for (neg, term) in split_terms(s)? {
            let sign = Coeff::from_int(if neg { -1 } else { 1 });
            let (head, gen) = split_generator(&term);
            let coef = if head.is_empty() { Coeff::one() } else { parse_coeff(head)? };
            let coef = &coef * &sign;
            let gen = gen.trim();
            match gen {
                "Dt" => e.a = &e.a + &coef,
                "Dy" => e.b = &e.b + &coef,
                "F" => e.c = &e.c + &coef,
                "0" if coef.is_one() || coef == Coeff::from_int(-1) => {}
                _ => {
                    let inner = |name: char| -> Option<&str> {
                        gen.strip_prefix(name)?.trim_start().strip_prefix('(')?.strip_suffix(')')
                    };
                    if let Some(arg) = inner('X') {
                        e.f = &e.f + &arg.parse::<ExpPoly>()?.scale(&coef);
                    } else if let Some(arg) = inner('Z') {
                        e.g = &e.g + &arg.parse::<ExpPoly>()?.scale(&coef);
                    } else if let Ok(v) = gen.parse::<Rat>() {
                        if !v.is_zero() {
                            return Err(Error::Parse(format!("stray constant `{gen}` in `{s}`")));
                        }
                    } else {
                        return Err(Error::Parse(format!(
                            "unknown generator `{gen}` (expected Dt, Dy, F, X(..), Z(..))"
                        )));
                    }
                }
            }
        }
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::coeff::rat;
    use crate::algebra::exppoly::strategies::{exppoly, small_rat};
    use proptest::prelude::*;

    fn ep(s: &str) -> ExpPoly {
        s.parse().unwrap()
    }

    fn el(s: &str) -> AlgebraElement {
        s.parse().unwrap()
    }

    #[test]
    fn time_derivative_bracket() {
        let b = commutator(&AlgebraElement::dt(), &AlgebraElement::x(ep("t^2")));
        assert_eq!(b, AlgebraElement::x(ep("2t")));
    }

    #[test]
    fn x_operators_commute() {
        let b = commutator(&AlgebraElement::x(ep("t^3 + exp(t)")), &AlgebraElement::x(ep("5")));
        assert!(b.is_zero());
    }

    #[test]
    fn dy_bracket_produces_gauge() {
        let b = commutator(&AlgebraElement::dy(), &AlgebraElement::x(ep("exp(2t)")));
        assert_eq!(b, AlgebraElement::z(ep("-2exp(2t)")));
    }

    #[test]
    fn adjoint_table() {
        // Ad(e^{εZ(g)})∂t = ∂t + εZ(g′)
        let r = adjoint(&AlgebraElement::z(ep("t^3")), &rat(2, 1), &AlgebraElement::dt()).unwrap();
        assert_eq!(r, el("Dt + Z(6t^2)"));
        // Ad(e^{ε∂t})Z(g) = Z(g(t−ε))
        let r = adjoint(&AlgebraElement::dt(), &rat(1, 1), &AlgebraElement::z(ep("t"))).unwrap();
        assert_eq!(r, AlgebraElement::z(ep("t - 1")));
        // Ad(e^{εX(f)})∂t = ∂t + εX(f′)
        let r = adjoint(&AlgebraElement::x(ep("t^2")), &rat(1, 2), &AlgebraElement::dt()).unwrap();
        assert_eq!(r, el("Dt + X(t)"));
        // Ad(e^{ε∂t})X(f) = X(f(t−ε))
        let r = adjoint(&AlgebraElement::dt(), &rat(3, 1), &AlgebraElement::x(ep("exp(t)"))).unwrap();
        assert_eq!(r, AlgebraElement::x(ep("E(-3) exp(t)")));
        // Ad(e^{εX(f)})∂y = ∂y − εZ(f′)
        let r = adjoint(&AlgebraElement::x(ep("t^2")), &rat(1, 1), &AlgebraElement::dy()).unwrap();
        assert_eq!(r, el("Dy + Z(-2t)"));
        // Ad(e^{ε∂y})X(f) = X(f) + εZ(f′)
        let r = adjoint(&AlgebraElement::dy(), &rat(2, 1), &AlgebraElement::x(ep("t^2"))).unwrap();
        assert_eq!(r, el("X(t^2) + Z(4t)"));
    }

    #[test]
    fn froude_shift_is_central() {
        let f = AlgebraElement::froude_shift();
        for target in ["Dt", "Dy + X(t)", "X(exp(t)) + 2*F + Z(t^2)"] {
            assert_eq!(adjoint(&f, &rat(5, 3), &el(target)).unwrap(), el(target));
        }
    }

    #[test]
    fn general_time_generator_is_rejected() {
        let a = el("Dt + X(t)");
        assert!(matches!(adjoint(&a, &rat(1, 1), &AlgebraElement::dy()), Err(Error::NonTerminating(_))));
    }

    #[test]
    fn structure_membership() {
        assert!(Subspace::CenterDerived.contains(&el("X(1) + Z(1)")));
        assert!(!Subspace::Nilradical.contains(&AlgebraElement::dt()));
        for s in Subspace::ALL {
            assert!(s.contains(&AlgebraElement::zero()));
        }
        assert!(!Subspace::Center.contains(&el("X(t)")));
        assert!(Subspace::Center.contains(&el("X(2) + F")));
        assert!(!Subspace::CenterNilDerived.contains(&el("F")));
    }

    #[test]
    fn text_form() {
        let e = el("1/2*Dt - Dy + X((3+2t^2)exp(1/2 t)) + 3*F + Z(t)");
        assert_eq!(e.a, Coeff::from_rat(rat(1, 2)));
        assert_eq!(e.b, Coeff::from_int(-1));
        assert_eq!(e.c, Coeff::from_int(3));
        assert_eq!(e.to_string(), "1/2*Dt - Dy + X((3 + 2*t^2)exp(1/2 t)) + 3*F + Z(t)");
        assert_eq!(el("0"), AlgebraElement::zero());
        assert!("Dt + W(t)".parse::<AlgebraElement>().is_err());
        assert!("Dt +".parse::<AlgebraElement>().is_err());
    }

    pub(crate) fn element() -> impl Strategy<Value = AlgebraElement> {
        (small_rat(), small_rat(), exppoly(), small_rat(), exppoly()).prop_map(|(a, b, f, c, g)| {
            AlgebraElement {
                a: Coeff::from_rat(a),
                b: Coeff::from_rat(b),
                f,
                c: Coeff::from_rat(c),
                g,
            }
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn jacobi_identity(a in element(), b in element(), c in element()) {
            let j = &(&commutator(&commutator(&a, &b), &c) + &commutator(&commutator(&b, &c), &a))
                + &commutator(&commutator(&c, &a), &b);
            prop_assert!(j.is_zero());
        }

        #[test]
        fn antisymmetry(a in element(), b in element()) {
            prop_assert_eq!(commutator(&a, &b), -&commutator(&b, &a));
        }

        #[test]
        fn text_round_trip(a in element()) {
            prop_assert_eq!(a.to_string().parse::<AlgebraElement>().unwrap(), a);
        }

        #[test]
        fn nilradical_brackets_land_in_gauge(a in element(), b in element()) {
            let (mut a, mut b) = (a, b);
            a.a = Coeff::zero();
            b.a = Coeff::zero();
            let ab = commutator(&a, &b);
            prop_assert!(Subspace::NilDerived.contains(&ab));
            prop_assert!(commutator(&ab, &a).is_zero());
        }

        #[test]
        fn adjoint_is_homomorphism(
            which in 0usize..5,
            eps in small_rat(),
            p in exppoly(),
            b in element(),
            c in element(),
        ) {
            let gen = match which {
                0 => AlgebraElement::dt(),
                1 => AlgebraElement::dy(),
                2 => AlgebraElement::x(p),
                3 => AlgebraElement::froude_shift(),
                _ => AlgebraElement::z(p),
            };
            let lhs = adjoint(&gen, &eps, &commutator(&b, &c)).unwrap();
            let rhs = commutator(&adjoint(&gen, &eps, &b).unwrap(), &adjoint(&gen, &eps, &c).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
