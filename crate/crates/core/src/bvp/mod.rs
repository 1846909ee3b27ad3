//! Channel and rectangle boundary conditions, and which point
//! transformations map a boundary value problem to itself.
//!
//! Walls `y ∈ {0, Y}` require `∂ψᵢ/∂x = 0` and a constant mean `∂ψᵢ/∂y`.
//! The rectangle adds walls `x ∈ {−L, L}` with the transposed conditions.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fields::{Field2D, GridSpec, Topology};
use crate::model::{ExactSolution, LayerState, Representation};
use crate::transforms::{apply_to_solution, PointTransform};

/// Bound on every boundary residual for the empirical test to count a
/// transform as preserving.
pub const EMPIRICAL_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SettingKind {
    /// Walls at `y = 0, Y`, unbounded in x.
    Infinite,
    /// Walls at `y = 0, Y`, period `2L` in x.
    PeriodicChannel,
    /// Walls on all four sides of `[−L, L] × [0, Y]`.
    LimitedRectangle,
}

impl SettingKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SettingKind::Infinite => "infinite",
            SettingKind::PeriodicChannel => "periodic",
            SettingKind::LimitedRectangle => "rectangle",
        }
    }
}

impl FromStr for SettingKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "infinite" => Ok(SettingKind::Infinite),
            "periodic" | "periodic_channel" | "channel" => Ok(SettingKind::PeriodicChannel),
            "rectangle" | "limited_rectangle" | "limited" => Ok(SettingKind::LimitedRectangle),
            other => Err(Error::UnknownName(format!("boundary setting '{other}'"))),
        }
    }
}

impl fmt::Display for SettingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundarySetting {
    pub kind: SettingKind,
    /// Half-length `L` in x; for the infinite channel, the half-length of
    /// the window over which circulation is averaged.
    pub half_length: f64,
    /// Channel width `Y`.
    pub width: f64,
}

impl BoundarySetting {
    pub fn new(kind: SettingKind, half_length: f64, width: f64) -> Result<Self> {
        for (name, v) in [("L", half_length), ("Y", width)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::branch(&format!("{name} positive and finite"), format!("{name} = {v}")));
            }
        }
        Ok(BoundarySetting { kind, half_length, width })
    }

    /// Grid covering the domain with `nx × ny` cells.
    pub fn grid(&self, nx: usize, ny: usize) -> Result<GridSpec> {
        let topology = match self.kind {
            SettingKind::LimitedRectangle => Topology::Rectangle,
            _ => Topology::Channel,
        };
        GridSpec::new(nx, ny, 2.0 * self.half_length, self.width, topology)
    }

    fn check_grid(&self, g: &GridSpec) -> Result<()> {
        let expected = match self.kind {
            SettingKind::LimitedRectangle => Topology::Rectangle,
            _ => Topology::Channel,
        };
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1.0);
        if g.topology != expected || !close(g.lx, 2.0 * self.half_length) || !close(g.ly, self.width) {
            return Err(Error::InvalidGrid(format!(
                "{} setting with L = {}, Y = {} needs a {} grid of size {} x {}, got {g}",
                self.kind,
                self.half_length,
                self.width,
                expected,
                2.0 * self.half_length,
                self.width
            )));
        }
        Ok(())
    }

    /// Samples a solution; grid node `(0, 0)` sits at `(−L, 0)`.
    pub fn sample(&self, sol: &dyn ExactSolution, grid: GridSpec, t: f64) -> Result<LayerState> {
        let l = self.half_length;
        let a = Field2D::try_from_fn(grid, |x, y| sol.eval(t, x - l, y).map(|v| v.0))?;
        let b = Field2D::try_from_fn(grid, |x, y| sol.eval(t, x - l, y).map(|v| v.1))?;
        LayerState::layered(t, a, b)
    }
}

/// Largest violation of each boundary condition over both layers.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BcResidual {
    /// `max |∂ψᵢ/∂x|` on `y ∈ {0, Y}`.
    pub wall_slope: f64,
    /// `max |Δ mean ∂ψᵢ/∂y| / dt` on `y ∈ {0, Y}`.
    pub circulation_rate: f64,
    /// `max |∂ψᵢ/∂y|` on `x ∈ {−L, L}` (rectangle only).
    pub side_slope: Option<f64>,
    /// `max |Δ mean ∂ψᵢ/∂x| / dt` on `x ∈ {−L, L}` (rectangle only).
    pub side_circulation_rate: Option<f64>,
}

impl BcResidual {
    pub fn max(&self) -> f64 {
        [self.wall_slope, self.circulation_rate]
            .into_iter()
            .chain(self.side_slope)
            .chain(self.side_circulation_rate)
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for BcResidual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "wall_slope={:.3e} circulation_rate={:.3e}", self.wall_slope, self.circulation_rate)?;
        if let (Some(s), Some(c)) = (self.side_slope, self.side_circulation_rate) {
            write!(f, " side_slope={s:.3e} side_circulation_rate={c:.3e}")?;
        }
        Ok(())
    }
}

/// Derivative along a line of samples; second order, one-sided at open ends.
fn derivative(v: &[f64], h: f64, periodic: bool) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|k| {
            if periodic {
                (v[(k + 1) % n] - v[(k + n - 1) % n]) / (2.0 * h)
            } else if k == 0 {
                (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
            } else if k == n - 1 {
                (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h)
            } else {
                (v[k + 1] - v[k - 1]) / (2.0 * h)
            }
        })
        .collect()
}

/// Mean over a line: plain for periodic lines, trapezoidal otherwise.
fn line_mean(v: &[f64], periodic: bool) -> f64 {
    let n = v.len();
    if periodic {
        v.iter().sum::<f64>() / n as f64
    } else {
        let inner: f64 = v[1..n - 1].iter().sum();
        (inner + 0.5 * (v[0] + v[n - 1])) / (n - 1) as f64
    }
}

struct WallData {
    slope: f64,
    /// mean normal derivative on each of the two walls
    circulation: [f64; 2],
}

fn row(f: &Field2D, j: usize) -> Vec<f64> {
    (0..f.grid().mx()).map(|i| f.at(i, j)).collect()
}

fn column(f: &Field2D, i: usize) -> Vec<f64> {
    (0..f.grid().my()).map(|j| f.at(i, j)).collect()
}

/// Conditions on the walls `y ∈ {0, Y}` (rows) of one field. Channel rows
/// cover `[−L, L)` and are averaged as a full window; rectangle rows include
/// both corners.
fn row_walls(f: &Field2D, x_periodic: bool, rows_closed: bool) -> WallData {
    let g = f.grid();
    let mut slope = 0.0f64;
    let mut circulation = [0.0; 2];
    for (w, j) in [0, g.ny].into_iter().enumerate() {
        let along = derivative(&row(f, j), g.hx(), x_periodic);
        slope = along.iter().fold(slope, |m, d| m.max(d.abs()));
        let normal: Vec<f64> =
            (0..g.mx()).map(|i| derivative(&column(f, i), g.hy(), false)[j]).collect();
        circulation[w] = line_mean(&normal, !rows_closed);
    }
    WallData { slope, circulation }
}

/// Conditions on the walls `x ∈ {−L, L}` (columns) of one field.
fn column_walls(f: &Field2D) -> WallData {
    let g = f.grid();
    let mut slope = 0.0f64;
    let mut circulation = [0.0; 2];
    for (w, i) in [0, g.nx].into_iter().enumerate() {
        let along = derivative(&column(f, i), g.hy(), false);
        slope = along.iter().fold(slope, |m, d| m.max(d.abs()));
        let normal: Vec<f64> = (0..g.my()).map(|j| derivative(&row(f, j), g.hx(), false)[i]).collect();
        circulation[w] = line_mean(&normal, false);
    }
    WallData { slope, circulation }
}

/// Boundary residuals of `state`, with circulation rates measured against
/// `prev`, taken `dt` earlier.
pub fn bc_residual(state: &LayerState, setting: &BoundarySetting, prev: &LayerState, dt: f64) -> Result<BcResidual> {
    state.grid().same_as(prev.grid())?;
    setting.check_grid(state.grid())?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::branch("dt > 0", format!("dt = {dt}")));
    }
    state.check_finite()?;
    prev.check_finite()?;
    let now = state.to(Representation::Layered)?;
    let before = prev.to(Representation::Layered)?;
    let x_periodic = setting.kind == SettingKind::PeriodicChannel;
    let rate = |a: &WallData, b: &WallData| {
        (0..2).map(|w| (a.circulation[w] - b.circulation[w]).abs() / dt).fold(0.0, f64::max)
    };
    let mut out = BcResidual::default();
    let rect = setting.kind == SettingKind::LimitedRectangle;
    if rect {
        out.side_slope = Some(0.0);
        out.side_circulation_rate = Some(0.0);
    }
    for (a, b) in [(&now.first, &before.first), (&now.second, &before.second)] {
        let (wa, wb) = (row_walls(a, x_periodic, rect), row_walls(b, x_periodic, rect));
        out.wall_slope = out.wall_slope.max(wa.slope);
        out.circulation_rate = out.circulation_rate.max(rate(&wa, &wb));
        if rect {
            let (sa, sb) = (column_walls(a), column_walls(b));
            out.side_slope = out.side_slope.map(|m| m.max(sa.slope));
            out.side_circulation_rate = out.side_circulation_rate.map(|m| m.max(rate(&sa, &sb)));
        }
    }
    Ok(out)
}

/// Outcome of a preservation test with a human-readable reason.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub preserved: bool,
    pub witness: String,
    /// Largest boundary residual found (empirical test only).
    pub residual: Option<f64>,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.preserved { "preserved" } else { "violated" })?;
        if !self.witness.is_empty() {
            write!(f, ": {}", self.witness)?;
        }
        Ok(())
    }
}

/// Decides preservation from the shape of the transformation.
///
/// Walls must land on walls: `y ↦ y` or, with `ε₂ = −1`, `y ↦ Y − y`. The
/// boost term `−2f′y` keeps the wall circulation constant only for affine
/// `f`. Side walls at `x = ±L` additionally forbid any x-translation.
pub fn transform_preserves_bvp(tr: &PointTransform, setting: &BoundarySetting) -> Verdict {
    let mut reasons = Vec::new();
    if let Err(e) = tr.validate() {
        reasons.push(e.to_string());
    }
    let y_fixed = if tr.eps2 == 1 { 0.0 } else { setting.width };
    if (tr.y0 - y_fixed).abs() > 1e-12 * setting.width.max(1.0) {
        reasons.push(format!("y-walls move: Y0 = {} with eps2 = {} (needs {y_fixed})", tr.y0, tr.eps2));
    }
    match setting.kind {
        SettingKind::Infinite | SettingKind::PeriodicChannel => {
            if !tr.f.is_affine() {
                reasons.push(format!("f'' is not identically zero (f = {}): wall circulation drifts", tr.f));
            }
        }
        SettingKind::LimitedRectangle => {
            if !tr.f.is_zero() {
                reasons.push(format!("x-walls move: f = {}", tr.f));
            }
        }
    }
    Verdict { preserved: reasons.is_empty(), witness: reasons.join("; "), residual: None }
}

/// Probe satisfying the boundary conditions of `setting`, asymmetric in y so
/// that moved walls show up.
pub struct Probe {
    setting: BoundarySetting,
}

impl Probe {
    pub fn new(setting: BoundarySetting) -> Self {
        Probe { setting }
    }

    fn profile(&self, y: f64) -> f64 {
        let s = y / self.setting.width;
        4.0 * s * (1.0 - s) * (1.0 + 0.3 * s)
    }
}

impl ExactSolution for Probe {
    fn name(&self) -> String {
        format!("{} probe", self.setting.kind)
    }

    fn eval(&self, t: f64, x: f64, y: f64) -> Result<(f64, f64)> {
        let l = self.setting.half_length;
        let b = self.profile(y);
        Ok(match self.setting.kind {
            SettingKind::LimitedRectangle => {
                // stationary; vanishes on the side walls
                let s = x / l;
                let a = (1.0 - s * s) * (1.0 + 0.3 * s);
                (a * b, 0.6 * a * b)
            }
            _ => {
                let k = std::f64::consts::PI / l;
                let psi1 = b * (k * x + 0.7 * t).cos() + 0.2 * y;
                let psi2 = 0.5 * b * (2.0 * k * x - 0.4 * t + 1.0).cos() - 0.1 * y;
                (psi1, psi2)
            }
        })
    }
}

/// Sample times of the empirical test, avoiding `t = 0` where many time
/// functions vanish together.
const PROBE_TIMES: [f64; 4] = [0.37, 0.81, 1.29, 1.73];
const PROBE_DT: f64 = 1e-3;

/// Applies `tr` to the setting's probe and measures the boundary residual.
pub fn empirical_check(tr: &PointTransform, setting: &BoundarySetting) -> Result<Verdict> {
    empirical_check_on(tr, setting, 64, 32)
}

pub fn empirical_check_on(tr: &PointTransform, setting: &BoundarySetting, nx: usize, ny: usize) -> Result<Verdict> {
    let probe = Probe::new(*setting);
    let moved = apply_to_solution(tr, &probe)?;
    let grid = setting.grid(nx, ny)?;
    let mut worst = BcResidual::default();
    let mut worst_max = -1.0;
    for t in PROBE_TIMES {
        let now = setting.sample(&moved, grid, t)?;
        let prev = setting.sample(&moved, grid, t - PROBE_DT)?;
        let r = bc_residual(&now, setting, &prev, PROBE_DT)?;
        if r.max() > worst_max {
            worst_max = r.max();
            worst = r;
        }
    }
    Ok(Verdict {
        preserved: worst_max <= EMPIRICAL_TOLERANCE,
        witness: worst.to_string(),
        residual: Some(worst_max),
    })
}
