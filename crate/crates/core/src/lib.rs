pub mod error;
pub mod fields;
pub mod model;
pub mod algebra;
pub mod transforms;
pub mod catalog;
pub mod solver;
pub mod bvp;
