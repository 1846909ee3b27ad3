//! Exact arithmetic in the symmetry algebra spanned by `∂t`, `∂y`, `X(f)`,
//! `F` and `Z(g)`, with `f`, `g` exponential polynomials.

pub mod coeff;
pub mod element;
pub mod exppoly;
pub mod subalgebra;

pub use coeff::{rat, rat_int, Coeff, Rat};
pub use element::{adjoint, commutator, structure_subspaces, AlgebraElement, Subspace};
pub use exppoly::ExpPoly;
pub use subalgebra::{
    family_schema, parse_params, subalgebra_closed, ClosureReport, ParamKind, Params, Scalar,
    SubalgebraSpec, FAMILIES,
};
