use std::fmt;
use std::str::FromStr;

use crate::bvp::{BoundarySetting, SettingKind};
use crate::error::{Error, Result};
use crate::fields::{GridSpec, Scheme, Topology};
use crate::model::ModelParams;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TimeScheme {
    #[default]
    Rk4,
    /// Leapfrog with a Robert–Asselin filter; the filter dissipates, so
    /// conservation checks use RK4.
    LeapfrogRa,
}

impl FromStr for TimeScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "rk4" => Ok(TimeScheme::Rk4),
            "leapfrog_ra" | "leapfrog" => Ok(TimeScheme::LeapfrogRa),
            other => Err(Error::UnknownName(format!("time scheme '{other}'"))),
        }
    }
}

impl fmt::Display for TimeScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TimeScheme::Rk4 => "rk4",
            TimeScheme::LeapfrogRa => "leapfrog_ra",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub steps: usize,
    pub scheme: TimeScheme,
    /// Robert–Asselin coefficient in `[0, 0.1]`.
    pub ra_filter: f64,
    /// Spectral derivatives instead of finite differences.
    pub spectral: bool,
    /// Two-thirds truncation of products (spectral mode only).
    pub dealias: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt: 0.01,
            steps: 100,
            scheme: TimeScheme::Rk4,
            ra_filter: 0.01,
            spectral: false,
            dealias: false,
        }
    }
}

impl SolverConfig {
    pub fn rk4(dt: f64, steps: usize) -> Self {
        SolverConfig { dt, steps, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::branch("dt > 0", format!("dt = {}", self.dt)));
        }
        if !(0.0..=0.1).contains(&self.ra_filter) {
            return Err(Error::branch("ra_filter in [0, 0.1]", format!("ra_filter = {}", self.ra_filter)));
        }
        if self.dealias && !self.spectral {
            return Err(Error::branch("dealias requires spectral mode", "spectral = false".to_string()));
        }
        Ok(())
    }

    pub fn space(&self) -> Scheme {
        if self.spectral {
            Scheme::Spectral { dealias: self.dealias }
        } else {
            Scheme::FiniteDifference
        }
    }
}

/// Everything a `key = value` run file can set.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub solver: SolverConfig,
    pub model: ModelParams,
    pub grid: GridSpec,
    pub output_every: usize,
    pub t0: f64,
    /// Catalog entry used as the initial condition.
    pub solution: Option<String>,
    /// `param.<name> = value` overrides for the entry.
    pub params: Vec<(String, String)>,
    /// Directory for field files and the diagnostics series.
    pub output_dir: Option<String>,
    /// Seed for the optional initial perturbation.
    pub seed: u64,
    /// Amplitude of a seeded random perturbation added to the initial state.
    pub noise: f64,
    /// Boundary conditions checked on the final state.
    pub setting: Option<BoundarySetting>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let two_pi = 2.0 * std::f64::consts::PI;
        RunConfig {
            solver: SolverConfig::default(),
            model: ModelParams::default(),
            grid: GridSpec::periodic(32, 32, two_pi, two_pi).expect("valid default grid"),
            output_every: 10,
            t0: 0.0,
            solution: None,
            params: Vec::new(),
            output_dir: None,
            seed: 0,
            noise: 0.0,
            setting: None,
        }
    }
}

impl RunConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        let (mut nx, mut ny, mut lx, mut ly) = (c.grid.nx, c.grid.ny, c.grid.lx, c.grid.ly);
        let mut topology = c.grid.topology;
        let (mut beta, mut froude) = (c.model.beta, c.model.froude);
        let mut setting: Option<SettingKind> = None;
        let mut setting_len: (Option<f64>, Option<f64>) = (None, None);
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |message: String| Error::Config { line: line_no, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected 'key = value', got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            let real = || value.parse::<f64>().map_err(|e| bad(format!("{key}: {e}")));
            let count = || value.parse::<usize>().map_err(|e| bad(format!("{key}: {e}")));
            let flag = || value.parse::<bool>().map_err(|e| bad(format!("{key}: {e}")));
            match key {
                "dt" => c.solver.dt = real()?,
                "steps" => c.solver.steps = count()?,
                "scheme" => c.solver.scheme = value.parse().map_err(|e: Error| bad(e.to_string()))?,
                "ra_filter" => c.solver.ra_filter = real()?,
                "spectral" => c.solver.spectral = flag()?,
                "dealias" => c.solver.dealias = flag()?,
                "beta" => beta = real()?,
                "F" | "froude" => froude = real()?,
                "nx" => nx = count()?,
                "ny" => ny = count()?,
                "lx" => lx = real()?,
                "ly" => ly = real()?,
                "topology" => topology = Topology::parse(value).map_err(|e| bad(e.to_string()))?,
                "output_every" => c.output_every = count()?,
                "t0" => c.t0 = real()?,
                "solution" => c.solution = Some(value.to_string()),
                "output_dir" => c.output_dir = Some(value.to_string()),
                "seed" => c.seed = value.parse().map_err(|e| bad(format!("{key}: {e}")))?,
                "noise" => c.noise = real()?,
                "setting" => {
                    setting = Some(value.parse().map_err(|e: Error| bad(e.to_string()))?)
                }
                "L" => setting_len.0 = Some(real()?),
                "Y" => setting_len.1 = Some(real()?),
                _ => match key.strip_prefix("param.") {
                    Some(name) if !name.is_empty() => c.params.push((name.to_string(), value.to_string())),
                    _ => return Err(bad(format!("unknown key '{key}'"))),
                },
            }
        }
        let whole = |e: Error| Error::Config { line: 0, message: e.to_string() };
        c.model = ModelParams::new(beta, froude).map_err(whole)?;
        c.grid = GridSpec::new(nx, ny, lx, ly, topology).map_err(whole)?;
        c.solver.validate().map_err(whole)?;
        if let Some(kind) = setting {
            // the domain defaults to the grid: x in [-lx/2, lx/2], y in [0, ly]
            let l = setting_len.0.unwrap_or(0.5 * c.grid.lx);
            let y = setting_len.1.unwrap_or(c.grid.ly);
            c.setting = Some(BoundarySetting::new(kind, l, y).map_err(whole)?);
        }
        if !(c.noise.is_finite() && c.noise >= 0.0) {
            return Err(whole(Error::branch("noise >= 0", format!("noise = {}", c.noise))));
        }
        if c.output_every == 0 {
            return Err(whole(Error::branch("output_every >= 1", "output_every = 0")));
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_keys() {
        let text = "
            # run file
            dt = 0.05
            steps = 20
            scheme = leapfrog_ra
            ra_filter = 0.05
            spectral = true
            dealias = true
            beta = 2
            F = 0.5
            nx = 16
            ny = 8
            lx = 3
            ly = 2   # trailing comment
            topology = channel
            output_every = 5
            t0 = 1.5
            solution = rossby_wave
            param.k = 4
            output_dir = out/run1
            seed = 42
            noise = 1e-6
            setting = periodic
            L = 1.5
        ";
        let c = RunConfig::parse(text).unwrap();
        assert_eq!(c.solver.scheme, TimeScheme::LeapfrogRa);
        assert_eq!(c.solver.steps, 20);
        assert!(c.solver.dealias);
        assert_eq!(c.model, ModelParams::new(2.0, 0.5).unwrap());
        assert_eq!(c.grid, GridSpec::channel(16, 8, 3.0, 2.0).unwrap());
        assert_eq!(c.output_every, 5);
        assert_eq!(c.solution.as_deref(), Some("rossby_wave"));
        assert_eq!(c.params, vec![("k".to_string(), "4".to_string())]);
        assert_eq!(c.output_dir.as_deref(), Some("out/run1"));
        assert_eq!(c.seed, 42);
        assert_eq!(c.setting, Some(BoundarySetting::new(SettingKind::PeriodicChannel, 1.5, 2.0).unwrap()));
    }

    #[test]
    fn reports_line_numbers() {
        match RunConfig::parse("dt = 0.1\nsteps = many\n") {
            Err(Error::Config { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(RunConfig::parse("colour = red"), Err(Error::Config { line: 1, .. })));
        assert!(matches!(RunConfig::parse("no equals sign"), Err(Error::Config { line: 1, .. })));
        assert!(matches!(RunConfig::parse("ra_filter = 0.5"), Err(Error::Config { line: 0, .. })));
        assert!(matches!(RunConfig::parse("beta = -1"), Err(Error::Config { .. })));
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in [TimeScheme::Rk4, TimeScheme::LeapfrogRa] {
            assert_eq!(s.to_string().parse::<TimeScheme>().unwrap(), s);
        }
    }
}
