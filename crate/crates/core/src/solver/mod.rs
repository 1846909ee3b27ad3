//! Time integration of the two-layer equations in barotropic/baroclinic
//! potential-vorticity form.
//!
//! Prognostic fields are the relative PVs `Q̃⁺ = ∇²ψ̃⁺` and
//! `Q̃⁻ = ∇²ψ̃⁻ − 2Fψ̃⁻`, where `ψ̃` is the part of the stream function stored
//! on the grid. On periodic grids the state may also carry a linear
//! background `a x + b y` per mode (uniform winds), handled analytically.

mod config;
mod diagnostics;
mod dispersion;
mod run;

pub use config::{RunConfig, TimeScheme, SolverConfig};
pub use diagnostics::{diagnostics, diagnostics_with, wall_circulation, Diagnostics};
pub use dispersion::{fit_phase_speed, phase_of};
pub use run::{run, write_csv, Initial, Record, Trajectory, CSV_HEADER};

use crate::error::{Error, Result};
use crate::fields::{
    dx_with, dy_with, invert_helmholtz_with, invert_helmholtz_with_boundary, laplacian_with,
    poisson_bracket_with, Field2D, GridSpec, Scheme, Topology,
};
use crate::model::{ExactSolution, LayerState, ModelParams, Representation};

/// Linear part `a x + b y` of `ψ⁺` and `ψ⁻`, stored as `[a, b]`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Background {
    pub plus: [f64; 2],
    pub minus: [f64; 2],
}

impl Background {
    pub fn is_zero(&self) -> bool {
        self.plus == [0.0; 2] && self.minus == [0.0; 2]
    }

    fn check(&self, grid: &GridSpec) -> Result<()> {
        if self.is_zero() {
            return Ok(());
        }
        if grid.topology != Topology::DoublyPeriodic {
            return Err(Error::InvalidGrid(format!(
                "linear backgrounds need a doubly periodic grid, got {}",
                grid.topology
            )));
        }
        // a zonal slope of ψ⁺ feeds a uniform PV tendency that no periodic
        // barotropic field can absorb
        if self.plus[0] != 0.0 {
            return Err(Error::branch(
                "barotropic background has no x-slope",
                format!("d(psi+)/dx = {}", self.plus[0]),
            ));
        }
        if self.plus.iter().chain(&self.minus).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { context: "background slopes".into(), index: 0 });
        }
        Ok(())
    }

    fn field(slope: [f64; 2], grid: GridSpec) -> Field2D {
        Field2D::from_fn(grid, |x, y| slope[0] * x + slope[1] * y)
    }
}

/// Prognostic state plus the stream functions consistent with it.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverState {
    pub t: f64,
    pub q_plus: Field2D,
    pub q_minus: Field2D,
    pub psi_plus: Field2D,
    pub psi_minus: Field2D,
    pub background: Background,
}

impl SolverState {
    pub fn grid(&self) -> &GridSpec {
        self.q_plus.grid()
    }

    /// Full stream functions, background included.
    pub fn layer_state(&self) -> Result<LayerState> {
        let g = *self.grid();
        let plus = self.psi_plus.add(&Background::field(self.background.plus, g))?;
        let minus = self.psi_minus.add(&Background::field(self.background.minus, g))?;
        LayerState::barotropic_baroclinic(self.t, plus, minus)
    }

    /// Grid part of the stream functions only.
    pub fn periodic_part(&self) -> Result<LayerState> {
        LayerState::barotropic_baroclinic(self.t, self.psi_plus.clone(), self.psi_minus.clone())
    }

    pub fn check_finite(&self) -> Result<()> {
        self.q_plus.check_finite("barotropic PV")?;
        self.q_minus.check_finite("baroclinic PV")?;
        self.psi_plus.check_finite("barotropic stream function")?;
        self.psi_minus.check_finite("baroclinic stream function")
    }
}

/// Wall-value correction for channel inversions: adds multiples of the
/// homogeneous solutions that are 1 on one wall and 0 on the other so the
/// wall circulations keep their initial values.
#[derive(Clone, Debug)]
struct Capacitance {
    mu: f64,
    south: Field2D,
    north: Field2D,
    /// circulations of `[south, north]` at `[south wall, north wall]`
    gram: [[f64; 2]; 2],
    target: [f64; 2],
    /// `ψ` on the south wall, fixed when `μ = 0`
    south_value: f64,
}

impl Capacitance {
    fn new(grid: GridSpec, mu: f64, initial: &Field2D) -> Result<Self> {
        let zero = Field2D::zeros(grid);
        let wall = |j0: usize| {
            Field2D::from_values(
                grid,
                (0..grid.len()).map(|k| if k / grid.mx() == j0 { 1.0 } else { 0.0 }).collect(),
            )
        };
        let south = invert_helmholtz_with_boundary(&zero, mu, &wall(0)?)?;
        let north = invert_helmholtz_with_boundary(&zero, mu, &wall(grid.ny)?)?;
        let cs = wall_circulation(&south)?;
        let cn = wall_circulation(&north)?;
        Ok(Capacitance {
            mu,
            gram: [[cs.0, cn.0], [cs.1, cn.1]],
            south,
            north,
            target: {
                let c = wall_circulation(initial)?;
                [c.0, c.1]
            },
            south_value: initial.at(0, 0),
        })
    }

    fn invert(&self, rhs: &Field2D) -> Result<Field2D> {
        let base = invert_helmholtz_with_boundary(rhs, self.mu, &Field2D::zeros(*rhs.grid()))?;
        let c = wall_circulation(&base)?;
        let r = [self.target[0] - c.0, self.target[1] - c.1];
        let g = self.gram;
        let (s, n) = if self.mu == 0.0 {
            // constants are harmonic: only the wall difference matters
            let s = self.south_value;
            (s, (r[1] - g[1][0] * s) / g[1][1])
        } else {
            let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
            if det.abs() < 1e-300 {
                return Err(Error::Singular("channel capacitance matrix".into()));
            }
            (
                (r[0] * g[1][1] - g[0][1] * r[1]) / det,
                (g[0][0] * r[1] - g[1][0] * r[0]) / det,
            )
        };
        base.axpy(s, &self.south)?.axpy(n, &self.north)
    }
}

/// Advances one state in time. Holds everything that does not change
/// between steps.
#[derive(Clone, Debug)]
pub struct Solver {
    pub params: ModelParams,
    pub config: SolverConfig,
    grid: GridSpec,
    space: Scheme,
    channel: Option<[Capacitance; 2]>,
    /// mean of `ψ⁺`, which the PV does not determine on periodic grids
    plus_mean: f64,
    state: SolverState,
    previous: Option<[Field2D; 2]>,
    steps_taken: usize,
}

impl Solver {
    /// Starts from stream functions without a background.
    pub fn new(initial: &LayerState, params: ModelParams, config: SolverConfig) -> Result<Self> {
        Self::with_background(initial, Background::default(), params, config)
    }

    /// `initial` holds the grid part; `background` the linear part.
    pub fn with_background(
        initial: &LayerState,
        background: Background,
        params: ModelParams,
        config: SolverConfig,
    ) -> Result<Self> {
        config.validate()?;
        initial.check_finite()?;
        let grid = *initial.grid();
        background.check(&grid)?;
        let space = config.space();
        space.check(&grid)?;
        if grid.topology == Topology::Rectangle {
            return Err(Error::InvalidGrid("the solver runs on periodic or channel grids".into()));
        }
        let s = initial.to(Representation::BarotropicBaroclinic)?;
        let (q_plus, q_minus) = relative_pv(&s.first, &s.second, &params, space)?;
        let channel = if grid.topology == Topology::Channel {
            for (name, f) in [("barotropic", &s.first), ("baroclinic", &s.second)] {
                check_wall_constant(f, name)?;
            }
            Some([
                Capacitance::new(grid, 0.0, &s.first)?,
                Capacitance::new(grid, 2.0 * params.froude, &s.second)?,
            ])
        } else {
            None
        };
        Ok(Solver {
            params,
            config,
            grid,
            space,
            channel,
            plus_mean: s.first.mean(),
            state: SolverState {
                t: initial.t,
                q_plus,
                q_minus,
                psi_plus: s.first,
                psi_minus: s.second,
                background,
            },
            previous: None,
            steps_taken: 0,
        })
    }

    /// Samples an exact solution at `t0`. On periodic grids a linear part
    /// (the solution's failure to be periodic) becomes the background.
    pub fn from_solution(
        sol: &dyn ExactSolution,
        grid: GridSpec,
        t0: f64,
        params: ModelParams,
        config: SolverConfig,
    ) -> Result<Self> {
        let (state, background) = sample_solution(sol, grid, t0)?;
        Self::with_background(&state, background, params, config)
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }

    pub fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// `dt·max|∇ψ|/h` for the current state.
    pub fn courant(&self) -> Result<f64> {
        let s = &self.state;
        let bg = s.background;
        let mut speed = 0.0f64;
        for (psi, slope) in [(&s.psi_plus, bg.plus), (&s.psi_minus, bg.minus)] {
            let u = dy_with(psi, self.space)?;
            let v = dx_with(psi, self.space)?;
            for k in 0..u.values().len() {
                let (a, b) = (v.values()[k] + slope[0], u.values()[k] + slope[1]);
                speed = speed.max(a.hypot(b));
            }
        }
        // layer speeds are half-sums of the modes; the bound is conservative
        Ok(self.config.dt * speed / self.grid.hx().min(self.grid.hy()))
    }

    /// Warnings about the configuration relative to the current state.
    pub fn warnings(&self) -> Result<Vec<String>> {
        let c = self.courant()?;
        let mut out = Vec::new();
        if c > 0.5 {
            out.push(format!("CFL number {c:.3} exceeds 0.5; the run may be unstable"));
        }
        Ok(out)
    }

    fn invert(&self, q_plus: &Field2D, q_minus: &Field2D) -> Result<(Field2D, Field2D)> {
        match &self.channel {
            Some([plus, minus]) => Ok((plus.invert(q_plus)?, minus.invert(q_minus)?)),
            None => {
                let mean = q_plus.mean();
                let q_plus = q_plus.map(|v| v - mean);
                let shift = self.plus_mean;
                Ok((
                    invert_helmholtz_with(&q_plus, 0.0, self.space)?.map(|v| v + shift),
                    invert_helmholtz_with(q_minus, 2.0 * self.params.froude, self.space)?,
                ))
            }
        }
    }

    /// Time derivatives of `(Q̃⁺, Q̃⁻)` given the stream functions.
    fn tendency(&self, psi_plus: &Field2D, psi_minus: &Field2D) -> Result<(Field2D, Field2D)> {
        let p = &self.params;
        let sp = self.space;
        let (q_plus, q_minus) = relative_pv(psi_plus, psi_minus, p, sp)?;
        let bg = self.state.background;
        let g_plus = [0.0, 2.0 * p.beta];
        let g_minus = [-2.0 * p.froude * bg.minus[0], -2.0 * p.froude * bg.minus[1]];
        // {A + a·x, B + G·x}
        let bracket = |a: &Field2D, slope: [f64; 2], b: &Field2D, grad: [f64; 2]| -> Result<Field2D> {
            let mut out = poisson_bracket_with(a, b, sp)?;
            if grad != [0.0; 2] {
                out = out.axpy(grad[1], &dx_with(a, sp)?)?.axpy(-grad[0], &dy_with(a, sp)?)?;
            }
            if slope != [0.0; 2] {
                out = out.axpy(slope[0], &dy_with(b, sp)?)?.axpy(-slope[1], &dx_with(b, sp)?)?;
            }
            let c = slope[0] * grad[1] - slope[1] * grad[0];
            Ok(if c != 0.0 { out.map(|v| v + c) } else { out })
        };
        let plus = bracket(psi_plus, bg.plus, &q_plus, g_plus)?
            .add(&bracket(psi_minus, bg.minus, &q_minus, g_minus)?)?
            .scale(-0.5);
        let minus = bracket(psi_plus, bg.plus, &q_minus, g_minus)?
            .add(&bracket(psi_minus, bg.minus, &q_plus, g_plus)?)?
            .scale(-0.5);
        Ok((plus, minus))
    }

    fn rate(&self, q: &[Field2D; 2]) -> Result<[Field2D; 2]> {
        let (pp, pm) = self.invert(&q[0], &q[1])?;
        let (a, b) = self.tendency(&pp, &pm)?;
        Ok([a, b])
    }

    fn rk4(&self, q: &[Field2D; 2], dt: f64) -> Result<[Field2D; 2]> {
        let stage = |k: &[Field2D; 2], s: f64| -> Result<[Field2D; 2]> {
            Ok([q[0].axpy(s, &k[0])?, q[1].axpy(s, &k[1])?])
        };
        let k1 = self.rate(q)?;
        let k2 = self.rate(&stage(&k1, 0.5 * dt)?)?;
        let k3 = self.rate(&stage(&k2, 0.5 * dt)?)?;
        let k4 = self.rate(&stage(&k3, dt)?)?;
        let mut out = q.clone();
        for m in 0..2 {
            out[m] = out[m]
                .axpy(dt / 6.0, &k1[m])?
                .axpy(dt / 3.0, &k2[m])?
                .axpy(dt / 3.0, &k3[m])?
                .axpy(dt / 6.0, &k4[m])?;
        }
        Ok(out)
    }

    /// Advances one step. On failure the state is left untouched.
    pub fn step(&mut self) -> Result<()> {
        let dt = self.config.dt;
        let q = [self.state.q_plus.clone(), self.state.q_minus.clone()];
        let (next, previous) = match (self.config.scheme, &self.previous) {
            (TimeScheme::LeapfrogRa, Some(prev)) => {
                let k = self.rate(&q)?;
                let next = [prev[0].axpy(2.0 * dt, &k[0])?, prev[1].axpy(2.0 * dt, &k[1])?];
                // Robert–Asselin: q ← q + ν(q_next − 2q + q_prev)
                let nu = self.config.ra_filter;
                let mut filtered = q.clone();
                for m in 0..2 {
                    let curvature = next[m].axpy(-2.0, &q[m])?.add(&prev[m])?;
                    filtered[m] = q[m].axpy(nu, &curvature)?;
                }
                (next, Some(filtered))
            }
            (TimeScheme::LeapfrogRa, None) => (self.rk4(&q, dt)?, Some(q)),
            (TimeScheme::Rk4, _) => (self.rk4(&q, dt)?, None),
        };
        let [q_plus, q_minus] = next;
        q_plus.check_finite("barotropic PV")?;
        q_minus.check_finite("baroclinic PV")?;
        let (psi_plus, psi_minus) = self.invert(&q_plus, &q_minus)?;
        let state = SolverState {
            t: self.state.t + dt,
            q_plus,
            q_minus,
            psi_plus,
            psi_minus,
            background: self.state.background,
        };
        state.check_finite()?;
        self.state = state;
        self.previous = previous;
        self.steps_taken += 1;
        Ok(())
    }
}

fn relative_pv(plus: &Field2D, minus: &Field2D, p: &ModelParams, sp: Scheme) -> Result<(Field2D, Field2D)> {
    Ok((
        laplacian_with(plus, sp)?,
        laplacian_with(minus, sp)?.axpy(-2.0 * p.froude, minus)?,
    ))
}

fn check_wall_constant(f: &Field2D, name: &str) -> Result<()> {
    let g = f.grid();
    let scale = f.max_abs().max(1.0);
    for j in [0, g.ny] {
        let first = f.at(0, j);
        if (0..g.mx()).any(|i| (f.at(i, j) - first).abs() > 1e-9 * scale) {
            return Err(Error::branch(
                "stream function constant along each wall",
                format!("{name} mode varies along the wall at row {j}"),
            ));
        }
    }
    Ok(())
}

/// One step from a background-free state.
pub fn step(state: &LayerState, params: &ModelParams, config: &SolverConfig) -> Result<LayerState> {
    let mut s = Solver::new(state, *params, config.clone())?;
    s.step()?;
    s.state().layer_state()?.to(state.representation)
}

/// Grid samples of a solution at `t0`, split into a periodic part and a
/// linear background when the grid is periodic.
pub fn sample_solution(
    sol: &dyn ExactSolution,
    grid: GridSpec,
    t0: f64,
) -> Result<(LayerState, Background)> {
    let modes = |x: f64, y: f64| -> Result<(f64, f64)> {
        let (a, b) = sol.eval(t0, x, y)?;
        Ok((a + b, a - b))
    };
    let plus = Field2D::try_from_fn(grid, |x, y| modes(x, y).map(|m| m.0))?;
    let minus = Field2D::try_from_fn(grid, |x, y| modes(x, y).map(|m| m.1))?;
    if grid.topology != Topology::DoublyPeriodic {
        return Ok((LayerState::barotropic_baroclinic(t0, plus, minus)?, Background::default()));
    }
    // jumps across one period, which must be uniform for a linear background
    let mut slopes = [[0.0; 2]; 2];
    for (axis, (dx, dy, len)) in [(grid.lx, 0.0, grid.lx), (0.0, grid.ly, grid.ly)].into_iter().enumerate() {
        let mut jumps: Vec<(f64, f64)> = Vec::with_capacity(grid.len());
        for j in 0..grid.my() {
            for i in 0..grid.mx() {
                let (x, y) = (grid.x(i), grid.y(j));
                let a = modes(x, y)?;
                let b = modes(x + dx, y + dy)?;
                jumps.push((b.0 - a.0, b.1 - a.1));
            }
        }
        let scale = plus.max_abs().max(minus.max_abs()).max(1.0);
        let (j0, j1) = jumps[0];
        if jumps.iter().any(|&(p, m)| (p - j0).abs() > 1e-8 * scale || (m - j1).abs() > 1e-8 * scale) {
            return Err(Error::branch(
                "solution periodic up to a linear part",
                format!("jump across the {} period is not uniform", ["x", "y"][axis]),
            ));
        }
        slopes[0][axis] = if j0.abs() > 1e-12 * scale { j0 / len } else { 0.0 };
        slopes[1][axis] = if j1.abs() > 1e-12 * scale { j1 / len } else { 0.0 };
    }
    let background = Background { plus: slopes[0], minus: slopes[1] };
    let plus = plus.sub(&Background::field(background.plus, grid))?;
    let minus = minus.sub(&Background::field(background.minus, grid))?;
    Ok((LayerState::barotropic_baroclinic(t0, plus, minus)?, background))
}

#[cfg(test)]
mod tests;
