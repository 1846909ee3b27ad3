//! The two-layer quasi-geostrophic equations on a grid.

mod params;
mod residual;
mod state;

pub use params::ModelParams;
pub use residual::{
    pde_residual, pde_residual_at, residual_convergence, Convergence, ExactSolution, Residual,
    CONVERGENCE_RATIO, ROUNDOFF_FLOOR,
};
pub use state::{potential_vorticity, potential_vorticity_with, tendency, tendency_with, LayerState, Representation};
