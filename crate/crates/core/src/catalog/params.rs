use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::ExpPoly;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamType {
    Real,
    Integer,
    /// Exponential polynomial in `t`.
    Function,
}

impl fmt::Display for ParamType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParamType::Real => "real",
            ParamType::Integer => "integer",
            ParamType::Function => "exp-poly",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamType,
    pub default: &'static str,
}

pub(crate) const fn real(name: &'static str, default: &'static str) -> ParamSpec {
    ParamSpec { name, kind: ParamType::Real, default }
}

pub(crate) const fn int(name: &'static str, default: &'static str) -> ParamSpec {
    ParamSpec { name, kind: ParamType::Integer, default }
}

pub(crate) const fn func(name: &'static str, default: &'static str) -> ParamSpec {
    ParamSpec { name, kind: ParamType::Function, default }
}

/// Raw `name=value` pairs as given on a command line.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamValues(BTreeMap<String, String>);

impl ParamValues {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses `k=3,l=2,f=t^2`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut out = BTreeMap::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected name=value, got `{part}`")))?;
            out.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(ParamValues(out))
    }

    pub fn with(mut self, name: &str, value: impl ToString) -> Self {
        self.0.insert(name.to_string(), value.to_string());
        self
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.0.get(name).map(String::as_str)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }
}

/// Parameters checked against a schema, with defaults filled in.
pub(crate) struct Resolved<'a> {
    schema: &'a [ParamSpec],
    given: &'a ParamValues,
}

impl<'a> Resolved<'a> {
    pub fn new(entry: &str, schema: &'a [ParamSpec], given: &'a ParamValues) -> Result<Self> {
        for k in given.names() {
            if !schema.iter().any(|s| s.name == k) {
                return Err(Error::UnknownName(format!("parameter `{k}` for {entry}")));
            }
        }
        Ok(Resolved { schema, given })
    }

    fn raw(&self, name: &str) -> &str {
        self.given.get(name).unwrap_or_else(|| {
            self.schema
                .iter()
                .find(|s| s.name == name)
                .map(|s| s.default)
                .unwrap_or_else(|| panic!("parameter {name} missing from schema"))
        })
    }

    pub fn real(&self, name: &str) -> Result<f64> {
        let raw = self.raw(name);
        let v: f64 = raw
            .parse()
            .map_err(|_| Error::Parse(format!("{name}: `{raw}` is not a number")))?;
        if !v.is_finite() {
            return Err(Error::Parse(format!("{name}: `{raw}` is not finite")));
        }
        Ok(v)
    }

    pub fn int(&self, name: &str) -> Result<i64> {
        let raw = self.raw(name);
        raw.parse()
            .map_err(|_| Error::Parse(format!("{name}: `{raw}` is not an integer")))
    }

    pub fn func(&self, name: &str) -> Result<ExpPoly> {
        self.raw(name).parse()
    }

    pub fn is_given(&self, name: &str) -> bool {
        self.given.get(name).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_defaults() {
        let schema = [real("k", "3"), func("f", "t^2"), int("m", "2")];
        let given = ParamValues::parse("k=1.5, f=exp(t)").unwrap();
        let r = Resolved::new("demo", &schema, &given).unwrap();
        assert_eq!(r.real("k").unwrap(), 1.5);
        assert_eq!(r.int("m").unwrap(), 2);
        assert_eq!(r.func("f").unwrap(), "exp(t)".parse::<ExpPoly>().unwrap());
        let bad = ParamValues::parse("q=1").unwrap();
        assert!(matches!(Resolved::new("demo", &schema, &bad), Err(Error::UnknownName(_))));
        assert!(ParamValues::parse("k").is_err());
    }
}
