//! Finite point symmetries and the discrete mirrors.

mod discrete;
mod point;
mod timefn;

pub use discrete::{apply_discrete, Discrete, Mirrored};
pub use point::{apply_to_solution, PointTransform, Transformed};
pub use timefn::TimeFn;
