//! The one- and two-dimensional subalgebra families and their closure test.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};

use super::coeff::{Coeff, Rat};
use super::element::{commutator, AlgebraElement};
use super::exppoly::ExpPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamKind {
    /// A real constant (exact coefficient).
    Scalar,
    /// A rational exponent.
    Exponent,
    /// A function of t.
    Function,
}

/// Named parameter values; constants are stored as constant functions.
pub type Params = BTreeMap<String, ExpPoly>;

/// Parses `nu=1,sigma=2,f=t^2`.
pub fn parse_params(s: &str) -> Result<Params> {
    let mut out = Params::new();
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected name=value, got `{item}`")))?;
        out.insert(k.trim().to_string(), v.trim().parse()?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubalgebraSpec {
    pub name: String,
    pub generators: Vec<AlgebraElement>,
    pub params: Params,
}

/// Family name, parameter schema, generator template.
pub const FAMILIES: &[(&str, &[(&str, ParamKind)], &str)] = &[
    ("A1_1", &[("a", ParamKind::Scalar), ("b", ParamKind::Scalar)], "Dt + a*Dy + b*F"),
    ("A1_2", &[("f", ParamKind::Function), ("b", ParamKind::Scalar)], "Dy + X(f) + b*F"),
    (
        "A1_3",
        &[("f", ParamKind::Function), ("g", ParamKind::Function), ("b", ParamKind::Scalar)],
        "X(f) + Z(g) + b*F",
    ),
    (
        "A2_1",
        &[
            ("kappa", ParamKind::Scalar),
            ("nu", ParamKind::Scalar),
            ("mu", ParamKind::Scalar),
            ("rho", ParamKind::Scalar),
        ],
        "Dt + kappa*F ; Dy + X(nu) + Z(mu) + rho*F",
    ),
    (
        "A2_2",
        &[("nu", ParamKind::Scalar), ("kappa", ParamKind::Scalar), ("sigma", ParamKind::Exponent)],
        "Dt + nu*Dy + kappa*F ; X(exp(sigma t)) + Z(nu sigma t exp(sigma t)), sigma != 0",
    ),
    (
        "A2_m1",
        &[("nu", ParamKind::Scalar), ("kappa", ParamKind::Scalar), ("sigma", ParamKind::Exponent)],
        "Dt + nu*Dy + kappa*F ; Z(exp(sigma t))",
    ),
    (
        "A2_3",
        &[
            ("nu", ParamKind::Scalar),
            ("kappa", ParamKind::Scalar),
            ("mu", ParamKind::Scalar),
            ("rho", ParamKind::Scalar),
        ],
        "Dt + nu*Dy + kappa*F ; X(1) + Z(mu) + rho*F",
    ),
    (
        "A2_m2",
        &[("nu", ParamKind::Scalar), ("kappa", ParamKind::Scalar), ("rho", ParamKind::Scalar)],
        "Dt + nu*Dy + kappa*F ; Z(1) + rho*F",
    ),
    ("A2_m3", &[("nu", ParamKind::Scalar)], "Dt + nu*Dy ; F"),
    (
        "A2_4",
        &[
            ("f", ParamKind::Function),
            ("kappa", ParamKind::Scalar),
            ("g", ParamKind::Function),
            ("rho", ParamKind::Scalar),
        ],
        "Dy + X(f) + kappa*F ; X(1) + Z(g) + rho*F, kappa*rho = 0",
    ),
    (
        "A2_m4",
        &[("f", ParamKind::Function), ("g", ParamKind::Function)],
        "Dy + X(f) ; Z(g) + F",
    ),
    (
        "A2_m5",
        &[("f", ParamKind::Function), ("kappa", ParamKind::Scalar), ("g", ParamKind::Function)],
        "Dy + X(f) + kappa*F ; Z(g), g != 0",
    ),
    (
        "A2_m6",
        &[
            ("f1", ParamKind::Function),
            ("g1", ParamKind::Function),
            ("kappa", ParamKind::Scalar),
            ("f2", ParamKind::Function),
            ("g2", ParamKind::Function),
            ("rho", ParamKind::Scalar),
        ],
        "X(f1) + Z(g1) + kappa*F ; X(f2) + Z(g2) + rho*F, independent",
    ),
];

pub fn family_schema(name: &str) -> Result<&'static [(&'static str, ParamKind)]> {
    FAMILIES
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|(_, s, _)| *s)
        .ok_or_else(|| Error::UnknownName(format!("subalgebra `{name}`")))
}

struct Lookup<'a>(&'a Params);

impl Lookup<'_> {
    fn func(&self, k: &str) -> ExpPoly {
        self.0.get(k).cloned().unwrap_or_default()
    }

    fn scalar(&self, k: &str) -> Result<Coeff> {
        self.func(k)
            .as_constant()
            .ok_or_else(|| Error::Parse(format!("parameter `{k}` must be a constant")))
    }

    fn exponent(&self, k: &str) -> Result<Rat> {
        self.scalar(k)?
            .as_rat()
            .ok_or_else(|| Error::Parse(format!("parameter `{k}` must be rational")))
    }
}

fn el(a: Coeff, b: Coeff, f: ExpPoly, c: Coeff, g: ExpPoly) -> AlgebraElement {
    AlgebraElement { a, b, f, c, g }
}

fn time_generator(p: &Lookup, with_kappa: bool) -> Result<AlgebraElement> {
    let kappa = if with_kappa { p.scalar("kappa")? } else { Coeff::zero() };
    Ok(el(Coeff::one(), p.scalar("nu")?, ExpPoly::zero(), kappa, ExpPoly::zero()))
}

impl SubalgebraSpec {
    /// Instantiates a family; missing parameters default to zero.
    pub fn new(name: &str, params: Params) -> Result<Self> {
        let schema = family_schema(name)?;
        for k in params.keys() {
            if !schema.iter().any(|(n, _)| n == k) {
                return Err(Error::UnknownName(format!("parameter `{k}` of {name}")));
            }
        }
        let p = Lookup(&params);
        let one = Coeff::one;
        let zero = Coeff::zero;
        let nil = ExpPoly::zero;
        let generators = match name {
            "A1_1" => vec![el(one(), p.scalar("a")?, nil(), p.scalar("b")?, nil())],
            "A1_2" => vec![el(zero(), one(), p.func("f"), p.scalar("b")?, nil())],
            "A1_3" => vec![el(zero(), zero(), p.func("f"), p.scalar("b")?, p.func("g"))],
            "A2_1" => vec![
                el(one(), zero(), nil(), p.scalar("kappa")?, nil()),
                el(
                    zero(),
                    one(),
                    ExpPoly::constant(p.scalar("nu")?),
                    p.scalar("rho")?,
                    ExpPoly::constant(p.scalar("mu")?),
                ),
            ],
            "A2_2" => {
                let sigma = p.exponent("sigma")?;
                if sigma.is_zero() {
                    return Err(Error::branch("sigma != 0", "A2_2 needs a nonzero exponent"));
                }
                let nu = p.scalar("nu")?;
                let e = ExpPoly::exp(sigma.clone());
                let z = (&ExpPoly::t() * &e).scale(&(&nu * &Coeff::from_rat(sigma)));
                vec![time_generator(&p, true)?, el(zero(), zero(), e, zero(), z)]
            }
            "A2_m1" => vec![
                time_generator(&p, true)?,
                AlgebraElement::z(ExpPoly::exp(p.exponent("sigma")?)),
            ],
            "A2_3" => vec![
                time_generator(&p, true)?,
                el(zero(), zero(), ExpPoly::one(), p.scalar("rho")?, ExpPoly::constant(p.scalar("mu")?)),
            ],
            "A2_m2" => vec![
                time_generator(&p, true)?,
                el(zero(), zero(), nil(), p.scalar("rho")?, ExpPoly::one()),
            ],
            "A2_m3" => vec![time_generator(&p, false)?, AlgebraElement::froude_shift()],
            "A2_4" => {
                let (kappa, rho) = (p.scalar("kappa")?, p.scalar("rho")?);
                if !(&kappa * &rho).is_zero() {
                    return Err(Error::branch("kappa*rho = 0", format!("kappa={kappa}, rho={rho}")));
                }
                vec![
                    el(zero(), one(), p.func("f"), kappa, nil()),
                    el(zero(), zero(), ExpPoly::one(), rho, p.func("g")),
                ]
            }
            "A2_m4" => vec![
                el(zero(), one(), p.func("f"), zero(), nil()),
                el(zero(), zero(), nil(), one(), p.func("g")),
            ],
            "A2_m5" => {
                if p.func("g").is_zero() {
                    return Err(Error::branch("g != 0", "A2_m5 needs a nonzero gauge function"));
                }
                vec![
                    el(zero(), one(), p.func("f"), p.scalar("kappa")?, nil()),
                    AlgebraElement::z(p.func("g")),
                ]
            }
            "A2_m6" => vec![
                el(zero(), zero(), p.func("f1"), p.scalar("kappa")?, p.func("g1")),
                el(zero(), zero(), p.func("f2"), p.scalar("rho")?, p.func("g2")),
            ],
            _ => unreachable!("schema lookup succeeded"),
        };
        Ok(SubalgebraSpec { name: name.to_string(), generators, params })
    }

    /// `A2_2` with the gauge argument replaced by `ν σ t² e^{σt}`, which
    /// breaks closure.
    pub fn mutated_a2_2(nu: Rat, kappa: Rat, sigma: Rat) -> Self {
        let e = ExpPoly::exp(sigma.clone());
        let t2 = &ExpPoly::t() * &ExpPoly::t();
        let z = (&t2 * &e).scale_rat(&(&nu * &sigma));
        let mut params = Params::new();
        params.insert("nu".into(), ExpPoly::from_rat(nu.clone()));
        params.insert("kappa".into(), ExpPoly::from_rat(kappa.clone()));
        params.insert("sigma".into(), ExpPoly::from_rat(sigma));
        SubalgebraSpec {
            name: "A2_2_mutated".into(),
            generators: vec![
                el(Coeff::one(), nu.into(), ExpPoly::zero(), kappa.into(), ExpPoly::zero()),
                el(Coeff::zero(), Coeff::zero(), e, Coeff::zero(), z),
            ],
            params,
        }
    }
}

/// Exact real number `num / den` over the exponential coefficient ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scalar {
    pub num: Coeff,
    pub den: Coeff,
}

impl Scalar {
    /// Simplified value when the denominator is rational.
    pub fn as_coeff(&self) -> Option<Coeff> {
        let d = self.den.as_rat()?;
        Some(self.num.scale(&(Rat::from_integer(1.into()) / d)))
    }

    pub fn to_f64(&self) -> f64 {
        self.num.to_f64() / self.den.to_f64()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_coeff() {
            Some(c) => write!(f, "{c}"),
            None => write!(f, "({})/({})", self.num, self.den),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosureReport {
    pub closed: bool,
    /// For each generator pair `(i, j)`, the coordinates of `[e_i, e_j]` in
    /// the generator basis, when it lies in the span.
    pub bracket_coords: Vec<((usize, usize), Option<Vec<Scalar>>)>,
}

fn det2(a: &Coeff, b: &Coeff, c: &Coeff, d: &Coeff) -> Coeff {
    &(a * d) - &(b * c)
}

/// Whether the span of the generators is closed under the bracket.
pub fn subalgebra_closed(s: &SubalgebraSpec) -> Result<ClosureReport> {
    match s.generators.as_slice() {
        [e] => {
            if e.is_zero() {
                return Err(Error::DependentGenerators(format!("{} has a zero generator", s.name)));
            }
            Ok(ClosureReport { closed: true, bracket_coords: vec![] })
        }
        [e1, e2] => {
            let br = commutator(e1, e2);
            let rows = AlgebraElement::coordinates(&[e1, e2, &br]);
            let (u, v, w) = (&rows[0], &rows[1], &rows[2]);
            let n = u.len();
            let pivot = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !det2(&u[i], &u[j], &v[i], &v[j]).is_zero());
            let (i, j) = pivot.ok_or_else(|| {
                Error::DependentGenerators(format!("{}: generators are proportional", s.name))
            })?;
            let det = det2(&u[i], &u[j], &v[i], &v[j]);
            // w = α u + β v  ⇒  α = det(w,v)/det(u,v), β = det(u,w)/det(u,v)
            let d1 = det2(&w[i], &w[j], &v[i], &v[j]);
            let d2 = det2(&u[i], &u[j], &w[i], &w[j]);
            let closed = (0..n).all(|k| &det * &w[k] == &(&d1 * &u[k]) + &(&d2 * &v[k]));
            let coords = closed.then(|| {
                vec![Scalar { num: d1, den: det.clone() }, Scalar { num: d2, den: det.clone() }]
            });
            Ok(ClosureReport { closed, bracket_coords: vec![((0, 1), coords)] })
        }
        other => Err(Error::Parse(format!(
            "closure check supports one or two generators, got {}",
            other.len()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::coeff::rat;

    fn spec(name: &str, params: &str) -> SubalgebraSpec {
        SubalgebraSpec::new(name, parse_params(params).unwrap()).unwrap()
    }

    #[test]
    fn a2_2_closes_with_coordinates() {
        let s = spec("A2_2", "nu=1,sigma=2,kappa=0");
        let br = commutator(&s.generators[0], &s.generators[1]);
        assert_eq!(br.to_string(), "X((2)exp(2 t)) + Z((4*t)exp(2 t))");
        let r = subalgebra_closed(&s).unwrap();
        assert!(r.closed);
        let coords = r.bracket_coords[0].1.as_ref().unwrap();
        assert_eq!(coords[0].as_coeff().unwrap(), Coeff::zero());
        assert_eq!(coords[1].as_coeff().unwrap(), Coeff::from_int(2));
    }

    #[test]
    fn one_dimensional_is_closed() {
        assert!(subalgebra_closed(&spec("A1_1", "a=1,b=2")).unwrap().closed);
    }

    #[test]
    fn mutation_breaks_closure() {
        let s = SubalgebraSpec::mutated_a2_2(rat(1, 1), rat(0, 1), rat(2, 1));
        assert!(!subalgebra_closed(&s).unwrap().closed);
    }

    #[test]
    fn family_constraints() {
        assert!(SubalgebraSpec::new("A2_2", parse_params("sigma=0").unwrap()).is_err());
        assert!(SubalgebraSpec::new("A2_4", parse_params("kappa=1,rho=1").unwrap()).is_err());
        assert!(SubalgebraSpec::new("A2_m5", parse_params("f=t").unwrap()).is_err());
        assert!(SubalgebraSpec::new("A2_9", Params::new()).is_err());
        assert!(SubalgebraSpec::new("A1_1", parse_params("zeta=1").unwrap()).is_err());
    }

    #[test]
    fn dependent_generators_are_reported() {
        let s = spec("A2_m6", "f1=t,g1=1,kappa=1,f2=2t,g2=2,rho=2");
        assert!(matches!(subalgebra_closed(&s), Err(Error::DependentGenerators(_))));
    }

    #[test]
    fn every_family_closes_at_sample_point() {
        let samples = [
            ("A1_1", "a=1/2,b=-3"),
            ("A1_2", "f=t^2+exp(t),b=1"),
            ("A1_3", "f=t,g=t^3,b=2"),
            ("A2_1", "kappa=1,nu=2,mu=-1,rho=1/3"),
            ("A2_2", "nu=3/2,kappa=-1,sigma=-1/2"),
            ("A2_m1", "nu=1,kappa=2,sigma=3"),
            ("A2_3", "nu=1,kappa=2,mu=3,rho=4"),
            ("A2_m2", "nu=-1,kappa=2,rho=5"),
            ("A2_m3", "nu=2"),
            ("A2_4", "f=t^2,kappa=0,g=t exp(t),rho=2"),
            ("A2_m4", "f=exp(2t),g=t"),
            ("A2_m5", "f=t,kappa=1,g=exp(-t)"),
            ("A2_m6", "f1=t,g1=1,kappa=0,f2=t^2,g2=exp(t),rho=1"),
        ];
        assert_eq!(samples.len(), FAMILIES.len());
        for (name, p) in samples {
            assert!(subalgebra_closed(&spec(name, p)).unwrap().closed, "{name}");
        }
    }
}
