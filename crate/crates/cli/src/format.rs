use qg_core::algebra::{Coeff, Scalar};
use qg_core::error::{Error, Result};

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// `64x32` → `(64, 32)`.
pub fn parse_grid(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse(format!("grid must look like NXxNY, got `{s}`"));
    let (a, b) = s.trim().split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

/// `-1,0.5` → `(-1.0, 0.5)`.
pub fn parse_pair(s: &str) -> Result<(f64, f64)> {
    let bad = || Error::Parse(format!("expected `x,y`, got `{s}`"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn term(c: &Scalar, basis: &str) -> Option<String> {
    if c.num.is_zero() {
        return None;
    }
    Some(match c.as_coeff() {
        Some(k) if k.is_one() => basis.to_string(),
        Some(k) if k == Coeff::from_int(-1) => format!("-{basis}"),
        Some(k) if k.terms().count() == 1 => format!("{k}*{basis}"),
        Some(k) => format!("({k})*{basis}"),
        None => format!("{c}*{basis}"),
    })
}

/// `2*e2`, `e1 - 1/2*e2`, or `0`.
pub fn combination(coords: &[Scalar]) -> String {
    let mut out = String::new();
    for (i, c) in coords.iter().enumerate() {
        let Some(t) = term(c, &format!("e{}", i + 1)) else { continue };
        if out.is_empty() {
            out = t;
        } else if let Some(rest) = t.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(&t);
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
