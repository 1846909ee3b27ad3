use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact real number `Σ c_r · e^r` with rational `c_r` and rational `r`.
///
/// Argument shifts of exponentials produce factors like `e^{-σε}`; keeping
/// them symbolic makes shifted functions compare exactly. Distinct `e^r`
/// are linearly independent over the rationals, so the canonical map form
/// decides equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Coeff {
    terms: BTreeMap<Rat, Rat>,
}

impl Coeff {
    pub fn zero() -> Self {
        Coeff::default()
    }

    pub fn one() -> Self {
        Coeff::from_rat(Rat::one())
    }

    pub fn from_rat(c: Rat) -> Self {
        Coeff::term(c, Rat::zero())
    }

    pub fn from_int(n: i64) -> Self {
        Coeff::from_rat(rat_int(n))
    }

    /// `c · e^r`
    pub fn term(c: Rat, r: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(r, c);
        }
        Coeff { terms }
    }

    /// `e^r`
    pub fn exp(r: Rat) -> Self {
        Coeff::term(Rat::one(), r)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_rat().is_some_and(|r| r.is_one())
    }

    /// The value when no exponential factor is present.
    pub fn as_rat(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self.terms.get(&Rat::zero()).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rat, &Rat)> {
        self.terms.iter()
    }

    pub fn scale(&self, s: &Rat) -> Coeff {
        if s.is_zero() {
            return Coeff::zero();
        }
        Coeff {
            terms: self.terms.iter().map(|(r, c)| (r.clone(), c * s)).collect(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(r, c)| rat_to_f64(c) * rat_to_f64(r).exp())
            .sum()
    }

    fn insert(terms: &mut BTreeMap<Rat, Rat>, r: Rat, c: Rat) {
        let e = terms.entry(r).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            terms.retain(|_, v| !v.is_zero());
        }
    }
}

impl Add for &Coeff {
    type Output = Coeff;
    fn add(self, o: &Coeff) -> Coeff {
        let mut terms = self.terms.clone();
        for (r, c) in &o.terms {
            Coeff::insert(&mut terms, r.clone(), c.clone());
        }
        Coeff { terms }
    }
}

impl Sub for &Coeff {
    type Output = Coeff;
    fn sub(self, o: &Coeff) -> Coeff {
        self + &(-o)
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff {
            terms: self.terms.iter().map(|(r, c)| (r.clone(), -c)).collect(),
        }
    }
}

impl Mul for &Coeff {
    type Output = Coeff;
    fn mul(self, o: &Coeff) -> Coeff {
        let mut terms = BTreeMap::new();
        for (r1, c1) in &self.terms {
            for (r2, c2) in &o.terms {
                Coeff::insert(&mut terms, r1 + r2, c1 * c2);
            }
        }
        Coeff { terms }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Coeff {
            type Output = Coeff;
            fn $m(self, o: Coeff) -> Coeff {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        -&self
    }
}

impl From<Rat> for Coeff {
    fn from(r: Rat) -> Self {
        Coeff::from_rat(r)
    }
}

impl Coeff {
    /// Rendering as a product factor, parenthesised when it is a sum.
    pub(crate) fn factor_string(&self) -> String {
        if self.terms.len() > 1 {
            format!("({self})")
        } else {
            self.to_string()
        }
    }
}

impl fmt::Display for Coeff {
    /// Terms by decreasing exponent: `3/2*E(1) - 2 + E(-1/2)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (r, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if r.is_zero() {
                f.write_str(&fmt_rat(&mag))?;
            } else if mag.is_one() {
                write!(f, "E({})", fmt_rat(r))?;
            } else {
                write!(f, "{}*E({})", fmt_rat(&mag), fmt_rat(r))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponentials_multiply_by_adding_exponents() {
        let a = Coeff::exp(rat(1, 2));
        let b = Coeff::exp(rat(-1, 2));
        assert_eq!(&a * &b, Coeff::one());
    }

    #[test]
    fn cancellation_is_canonical() {
        let a = &Coeff::term(rat_int(3), rat_int(1)) + &Coeff::from_int(2);
        let b = &a - &Coeff::term(rat_int(3), rat_int(1));
        assert_eq!(b, Coeff::from_int(2));
        assert!((&a - &a).is_zero());
    }

    #[test]
    fn numeric_value() {
        let a = &Coeff::term(rat_int(2), rat_int(1)) + &Coeff::from_int(1);
        assert!((a.to_f64() - (2.0 * 1f64.exp() + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn display() {
        let a = &Coeff::term(rat(3, 2), rat_int(1)) + &Coeff::from_int(-2);
        assert_eq!(a.to_string(), "3/2*E(1) - 2");
        assert_eq!(Coeff::exp(rat(-1, 3)).to_string(), "E(-1/3)");
    }
}
