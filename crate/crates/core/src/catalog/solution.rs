use std::fmt;

use crate::error::{Error, Result};
use crate::model::ExactSolution;

type Evaluator = Box<dyn Fn(f64, f64, f64) -> Result<(f64, f64)> + Send + Sync>;

/// A catalog solution with its parameters bound.
pub struct Solution {
    name: String,
    eval: Evaluator,
}

impl Solution {
    /// From a formula for `(ψ¹, ψ²)`.
    pub fn layered(
        name: impl Into<String>,
        f: impl Fn(f64, f64, f64) -> Result<(f64, f64)> + Send + Sync + 'static,
    ) -> Self {
        Solution { name: name.into(), eval: Box::new(f) }
    }

    /// From a formula for `(ψ⁺, ψ⁻)`.
    pub fn barotropic(
        name: impl Into<String>,
        f: impl Fn(f64, f64, f64) -> Result<(f64, f64)> + Send + Sync + 'static,
    ) -> Self {
        Solution::layered(name, move |t, x, y| {
            let (plus, minus) = f(t, x, y)?;
            Ok((0.5 * (plus + minus), 0.5 * (plus - minus)))
        })
    }

    /// `(ψ⁺, ψ⁻)` at a point.
    pub fn eval_barotropic(&self, t: f64, x: f64, y: f64) -> Result<(f64, f64)> {
        let (a, b) = (self.eval)(t, x, y)?;
        Ok((a + b, a - b))
    }

    /// Whether the formula is undefined at the point.
    pub fn singular_at(&self, t: f64, x: f64, y: f64) -> bool {
        matches!((self.eval)(t, x, y), Err(Error::Singular(_)))
    }
}

impl ExactSolution for Solution {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn eval(&self, t: f64, x: f64, y: f64) -> Result<(f64, f64)> {
        (self.eval)(t, x, y)
    }
}

impl fmt::Debug for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Solution").field("name", &self.name).finish_non_exhaustive()
    }
}

/// Relative width of the band around a vanishing denominator inside which
/// evaluation is refused.
pub const GUARD: f64 = 1e-8;

pub(crate) fn guard(value: f64, scale: f64, what: &str) -> Result<()> {
    if value.abs() <= GUARD * scale.abs() || value == 0.0 {
        Err(Error::Singular(format!("{what} = {value:e} lies within the guard band")))
    } else {
        Ok(())
    }
}
