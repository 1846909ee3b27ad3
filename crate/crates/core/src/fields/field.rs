use crate::error::{Error, Result};

use super::grid::GridSpec;

/// Real-valued nodal field on a [`GridSpec`], row-major with x fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Field2D {
    grid: GridSpec,
    values: Vec<f64>,
}

impl Field2D {
    pub fn zeros(grid: GridSpec) -> Self {
        Field2D { values: vec![0.0; grid.len()], grid }
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        Field2D { values: vec![c; grid.len()], grid }
    }

    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} values for {grid}, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Field2D { grid, values })
    }

    /// Samples `f(x, y)` at every node.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.my() {
            let y = grid.y(j);
            for i in 0..grid.mx() {
                values.push(f(grid.x(i), y));
            }
        }
        Field2D { grid, values }
    }

    /// Like [`Field2D::from_fn`] for fallible samplers.
    pub fn try_from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> Result<f64>) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.my() {
            let y = grid.y(j);
            for i in 0..grid.mx() {
                values.push(f(grid.x(i), y)?);
            }
        }
        Ok(Field2D { grid, values })
    }

    pub fn coord_x(grid: GridSpec) -> Self {
        Self::from_fn(grid, |x, _| x)
    }

    pub fn coord_y(grid: GridSpec) -> Self {
        Self::from_fn(grid, |_, y| y)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.grid.idx(i, j);
        self.values[k] = v;
    }

    pub fn check_finite(&self, context: &str) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            Some(index) => Err(Error::NonFinite { context: context.to_string(), index }),
            None => Ok(()),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field2D {
        Field2D {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Field2D, f: impl Fn(f64, f64) -> f64) -> Result<Field2D> {
        self.grid.same_as(&other.grid)?;
        Ok(Field2D {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Field2D) -> Result<Field2D> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field2D) -> Result<Field2D> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Field2D) -> Result<Field2D> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, s: f64) -> Field2D {
        self.map(|v| s * v)
    }

    /// `self + s * other`
    pub fn axpy(&self, s: f64, other: &Field2D) -> Result<Field2D> {
        self.zip_with(other, |a, b| a + s * b)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Trapezoidal integral over the domain.
    pub fn integral(&self) -> f64 {
        let g = &self.grid;
        let mut s = 0.0;
        for j in 0..g.my() {
            for i in 0..g.mx() {
                s += g.weight(i, j) * self.at(i, j);
            }
        }
        s
    }

    /// Max-abs over nodes at least `halo` cells away from every wall.
    pub fn max_abs_interior(&self, halo: usize) -> f64 {
        let g = &self.grid;
        let mut m: f64 = 0.0;
        for j in 0..g.my() {
            if !g.topology.y_periodic() && (j < halo || j + halo > g.ny) {
                continue;
            }
            for i in 0..g.mx() {
                if !g.topology.x_periodic() && (i < halo || i + halo > g.nx) {
                    continue;
                }
                m = m.max(self.at(i, j).abs());
            }
        }
        m
    }
}
