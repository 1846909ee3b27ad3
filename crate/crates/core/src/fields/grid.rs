use std::fmt;

use crate::error::{Error, Result};

/// Boundary topology of a rectangular grid.
///
/// * `DoublyPeriodic` – periodic in x and y, `nx × ny` nodes.
/// * `Channel` – periodic in x, rigid walls at `y = 0` and `y = Ly`; the wall
///   rows are stored, so there are `nx × (ny + 1)` nodes.
/// * `Rectangle` – walls on all four sides, `(nx + 1) × (ny + 1)` nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Topology {
    DoublyPeriodic,
    Channel,
    Rectangle,
}

impl Topology {
    pub fn as_str(&self) -> &'static str {
        match self {
            Topology::DoublyPeriodic => "doubly_periodic",
            Topology::Channel => "channel",
            Topology::Rectangle => "rectangle",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "doubly_periodic" | "periodic" => Ok(Topology::DoublyPeriodic),
            "channel" => Ok(Topology::Channel),
            "rectangle" | "limited_rectangle" => Ok(Topology::Rectangle),
            other => Err(Error::Parse(format!("unknown topology `{other}`"))),
        }
    }

    pub fn x_periodic(&self) -> bool {
        !matches!(self, Topology::Rectangle)
    }

    pub fn y_periodic(&self) -> bool {
        matches!(self, Topology::DoublyPeriodic)
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Grid description; node coordinates start at the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub topology: Topology,
}

pub const MIN_CELLS: usize = 8;

impl GridSpec {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64, topology: Topology) -> Result<Self> {
        if nx < MIN_CELLS || ny < MIN_CELLS {
            return Err(Error::InvalidGrid(format!(
                "nx and ny must be >= {MIN_CELLS}, got {nx}x{ny}"
            )));
        }
        if !(lx.is_finite() && lx > 0.0 && ly.is_finite() && ly > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "domain lengths must be positive and finite, got Lx={lx} Ly={ly}"
            )));
        }
        Ok(GridSpec { nx, ny, lx, ly, topology })
    }

    pub fn periodic(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        Self::new(nx, ny, lx, ly, Topology::DoublyPeriodic)
    }

    pub fn channel(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        Self::new(nx, ny, lx, ly, Topology::Channel)
    }

    pub fn hx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    /// Number of stored nodes along x.
    pub fn mx(&self) -> usize {
        if self.topology.x_periodic() {
            self.nx
        } else {
            self.nx + 1
        }
    }

    /// Number of stored nodes along y.
    pub fn my(&self) -> usize {
        if self.topology.y_periodic() {
            self.ny
        } else {
            self.ny + 1
        }
    }

    pub fn len(&self) -> usize {
        self.mx() * self.my()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.mx() + i
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.hx()
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        j as f64 * self.hy()
    }

    /// Area weight of node `(i, j)` for trapezoidal integration over the domain.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let wx = if !self.topology.x_periodic() && (i == 0 || i == self.nx) {
            0.5
        } else {
            1.0
        };
        let wy = if !self.topology.y_periodic() && (j == 0 || j == self.ny) {
            0.5
        } else {
            1.0
        };
        wx * wy * self.hx() * self.hy()
    }

    /// Whether node `(i, j)` lies on a wall.
    pub fn on_wall(&self, i: usize, j: usize) -> bool {
        (!self.topology.y_periodic() && (j == 0 || j == self.ny))
            || (!self.topology.x_periodic() && (i == 0 || i == self.nx))
    }

    pub fn same_as(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self} vs {other}")))
        }
    }

    /// Same grid with every cell count doubled.
    pub fn refined(&self) -> GridSpec {
        GridSpec { nx: self.nx * 2, ny: self.ny * 2, ..*self }
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}x{} [{} x {}] {}",
            self.nx, self.ny, self.lx, self.ly, self.topology
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_counts_follow_topology() {
        let p = GridSpec::periodic(16, 8, 1.0, 1.0).unwrap();
        assert_eq!((p.mx(), p.my()), (16, 8));
        let c = GridSpec::channel(16, 8, 1.0, 1.0).unwrap();
        assert_eq!((c.mx(), c.my()), (16, 9));
        assert_eq!(c.y(8), 1.0);
        let r = GridSpec::new(16, 8, 1.0, 1.0, Topology::Rectangle).unwrap();
        assert_eq!(r.len(), 17 * 9);
    }

    #[test]
    fn rejects_small_or_degenerate_grids() {
        assert!(GridSpec::periodic(4, 16, 1.0, 1.0).is_err());
        assert!(GridSpec::periodic(16, 16, 0.0, 1.0).is_err());
        assert!(GridSpec::periodic(16, 16, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn trapezoid_weights_sum_to_area() {
        for topo in [Topology::DoublyPeriodic, Topology::Channel, Topology::Rectangle] {
            let g = GridSpec::new(10, 12, 2.0, 3.0, topo).unwrap();
            let mut s = 0.0;
            for j in 0..g.my() {
                for i in 0..g.mx() {
                    s += g.weight(i, j);
                }
            }
            assert!((s - 6.0).abs() < 1e-12, "{topo}: {s}");
        }
    }
}
