use crate::error::Result;
use crate::fields::{dx_with, dy_with, laplacian_with, Field2D, Scheme};
use crate::model::{LayerState, ModelParams, Representation};

/// Integral invariants and wall circulations of one state.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Diagnostics {
    pub energy: f64,
    pub enstrophy1: f64,
    pub enstrophy2: f64,
    /// Mean of `∂ψⁱ/∂y` along the first row, per layer.
    pub circulation_south: [f64; 2],
    /// Mean of `∂ψⁱ/∂y` along the last row, per layer.
    pub circulation_north: [f64; 2],
}

fn integral_of_square(f: &Field2D) -> f64 {
    let g = f.grid();
    (0..g.my())
        .flat_map(|j| (0..g.mx()).map(move |i| (i, j)))
        .map(|(i, j)| f.at(i, j).powi(2) * g.weight(i, j))
        .sum()
}

/// Mean `∂ψ/∂y` along the first and last grid rows.
pub fn wall_circulation(psi: &Field2D) -> Result<(f64, f64)> {
    let g = *psi.grid();
    let d = dy_with(psi, Scheme::FiniteDifference)?;
    let row = |j: usize| (0..g.mx()).map(|i| d.at(i, j)).sum::<f64>() / g.mx() as f64;
    Ok((row(0), row(g.my() - 1)))
}

pub fn diagnostics(state: &LayerState, p: &ModelParams) -> Result<Diagnostics> {
    diagnostics_with(state, p, Scheme::FiniteDifference)
}

/// Energy `½∫(|∇ψ¹|² + |∇ψ²|² + F(ψ¹ − ψ²)²)` and layer enstrophies
/// `½∫(Qⁱ − βy)²` of the stored fields.
pub fn diagnostics_with(state: &LayerState, p: &ModelParams, scheme: Scheme) -> Result<Diagnostics> {
    let s = state.to(Representation::Layered)?;
    let (a, b) = (&s.first, &s.second);
    let diff = a.sub(b)?;
    let mut energy = p.froude * integral_of_square(&diff);
    for psi in [a, b] {
        energy += integral_of_square(&dx_with(psi, scheme)?) + integral_of_square(&dy_with(psi, scheme)?);
    }
    let q1 = laplacian_with(a, scheme)?.axpy(-p.froude, &diff)?;
    let q2 = laplacian_with(b, scheme)?.axpy(p.froude, &diff)?;
    let (s1, n1) = wall_circulation(a)?;
    let (s2, n2) = wall_circulation(b)?;
    Ok(Diagnostics {
        energy: 0.5 * energy,
        enstrophy1: 0.5 * integral_of_square(&q1),
        enstrophy2: 0.5 * integral_of_square(&q2),
        circulation_south: [s1, s2],
        circulation_north: [n1, n2],
    })
}
