//! Polynomial solutions of `r v''' + (λ+2) v'' + (β − 2ϰF r) v' − 2ϰF(λ+2) v = 0`
//! by exact elimination over the rationals.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::algebra::{rat_int, Rat};
use crate::error::{Error, Result};

/// `r v''' + a v'' + (b + c r) v' + d v = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearThirdOrder {
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
    pub d: Rat,
}

impl LinearThirdOrder {
    /// The scaling reduction with `λ = −k`; `kappa_f` is the product `ϰF`.
    pub fn scaling_reduction(k: u32, kappa_f: &Rat, beta: &Rat) -> Self {
        let shift = rat_int(2 - k as i64);
        let two_kf = rat_int(2) * kappa_f;
        LinearThirdOrder { a: shift.clone(), b: beta.clone(), c: -two_kf.clone(), d: -(two_kf * shift) }
    }

    /// Same equation with the sign of the zeroth-order term flipped.
    pub fn mutated(&self) -> Self {
        LinearThirdOrder { d: -self.d.clone(), ..self.clone() }
    }

    /// Coefficients of the left-hand side for `v = Σ pₙ rⁿ`.
    pub fn apply(&self, p: &[Rat]) -> Vec<Rat> {
        let coeff = |n: usize| p.get(n).cloned().unwrap_or_else(Rat::zero);
        (0..p.len().max(1))
            .map(|j| {
                let (j0, j1, j2) = (rat_int(j as i64), rat_int(j as i64 + 1), rat_int(j as i64 + 2));
                let second = &j2 * &j1 * coeff(j + 2);
                &second * &j0 + &self.a * &second
                    + &self.b * &j1 * coeff(j + 1)
                    + (&self.c * &j0 + &self.d) * coeff(j)
            })
            .collect()
    }

    /// Basis of the polynomial solutions of degree at most `max_degree`.
    pub fn kernel(&self, max_degree: usize) -> PolynomialKernel {
        let n = max_degree + 1;
        let columns: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                let mut e = vec![Rat::zero(); n];
                e[i] = Rat::one();
                self.apply(&e)
            })
            .collect();
        let mut rows: Vec<Vec<Rat>> = (0..n).map(|r| (0..n).map(|c| columns[c][r].clone()).collect()).collect();
        PolynomialKernel { max_degree, basis: nullspace(&mut rows, n) }
    }
}

fn nullspace(m: &mut [Vec<Rat>], cols: usize) -> Vec<Vec<Rat>> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(r) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(row, r);
        let inv = m[row][col].recip();
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in 0..cols {
                    let delta = &factor * &m[row][c];
                    m[r][c] -= delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Rat::zero(); cols];
            v[free] = Rat::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][free].clone();
            }
            trim(v)
        })
        .collect()
}

fn trim(mut v: Vec<Rat>) -> Vec<Rat> {
    while v.len() > 1 && v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialKernel {
    pub max_degree: usize,
    /// Coefficients by ascending power.
    pub basis: Vec<Vec<Rat>>,
}

impl PolynomialKernel {
    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }
}

impl fmt::Display for PolynomialKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "none found <= degree {}", self.max_degree);
        }
        for (i, p) in self.basis.iter().enumerate() {
            let terms: Vec<String> = p
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| match k {
                    0 => format!("{c}"),
                    1 => format!("({c})r"),
                    _ => format!("({c})r^{k}"),
                })
                .collect();
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}", terms.join(" + "))?;
        }
        Ok(())
    }
}

/// Polynomial kernel of the scaling-reduced equation with `λ = −k`.
pub fn polynomial_solutions(k: u32, kappa_f: &Rat, beta: &Rat, max_degree: usize) -> Result<PolynomialKernel> {
    if k == 0 {
        return Err(Error::branch("k >= 1", "k = 0"));
    }
    if !kappa_f.is_positive() || !beta.is_positive() {
        return Err(Error::branch("kappa*F > 0, beta > 0", format!("kappa*F = {kappa_f}, beta = {beta}")));
    }
    Ok(LinearThirdOrder::scaling_reduction(k, kappa_f, beta).kernel(max_degree))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Rat {
        rat_int(1)
    }

    #[test]
    fn kernels_are_exact() {
        for k in 2..=6u32 {
            let ker = polynomial_solutions(k, &one(), &one(), 8).unwrap();
            assert!(!ker.is_empty(), "k = {k}");
            let eq = LinearThirdOrder::scaling_reduction(k, &one(), &one());
            for p in &ker.basis {
                assert!(eq.apply(p).iter().all(Zero::is_zero));
                if k > 2 {
                    assert_eq!(p.len() - 1, k as usize - 2);
                }
            }
        }
    }

    #[test]
    fn degenerate_case_contains_constants() {
        let ker = polynomial_solutions(2, &one(), &one(), 5).unwrap();
        assert!(ker.basis.iter().any(|p| p.len() == 1));
    }

    #[test]
    fn third_case_by_hand() {
        // β a₁ + 2ϰF a₀ = 0
        let ker = polynomial_solutions(3, &one(), &one(), 4).unwrap();
        assert_eq!(ker.basis.len(), 1);
        let p = &ker.basis[0];
        assert_eq!(p[1], -(rat_int(2) * &p[0]));
    }

    #[test]
    fn mutation_removes_solutions() {
        for k in 3..=4 {
            let eq = LinearThirdOrder::scaling_reduction(k, &one(), &one()).mutated();
            for d in 0..=6 {
                assert!(eq.kernel(d).is_empty(), "k = {k}, d = {d}");
            }
        }
        // at k = 2 the flipped term is zero
        let eq = LinearThirdOrder::scaling_reduction(2, &one(), &one());
        assert_eq!(eq.mutated(), eq);
    }

    #[test]
    fn branch_guard() {
        assert!(polynomial_solutions(0, &one(), &one(), 3).is_err());
        assert!(polynomial_solutions(3, &rat_int(-1), &one(), 3).is_err());
        assert_eq!(
            LinearThirdOrder::scaling_reduction(3, &one(), &one()).mutated().kernel(2).to_string(),
            "none found <= degree 2"
        );
    }
}
