//! Grids, nodal fields, derivative operators and elliptic inversion.

pub mod elliptic;
pub mod field;
pub mod grid;
pub mod io;
pub mod ops;
pub mod spectral;

pub use elliptic::{invert_helmholtz, invert_helmholtz_with, invert_helmholtz_with_boundary};
pub use field::Field2D;
pub use grid::{GridSpec, Topology};
pub use ops::{
    dx, dx_with, dy, dy_with, laplacian, laplacian_with, poisson_bracket, poisson_bracket_with,
    Scheme,
};
