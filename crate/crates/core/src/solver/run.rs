use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fields::GridSpec;
use crate::model::{ExactSolution, LayerState, ModelParams};

use super::{diagnostics_with, Diagnostics, Solver, SolverConfig};

pub const CSV_HEADER: &str = "step,t,energy,enstrophy1,enstrophy2,circ_south,circ_north";

pub enum Initial<'a> {
    State(LayerState),
    Solution { solution: &'a dyn ExactSolution, grid: GridSpec, t0: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub step: usize,
    pub t: f64,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    /// Diagnostics at step 0, every `output_every` steps, and the last step.
    pub records: Vec<Record>,
    /// Full stream functions at the same steps.
    pub snapshots: Vec<(usize, LayerState)>,
    pub final_state: LayerState,
    pub warnings: Vec<String>,
}

fn record(solver: &Solver) -> Result<Record> {
    let s = solver.state();
    Ok(Record {
        step: solver.steps_taken(),
        t: s.t,
        diagnostics: diagnostics_with(&s.periodic_part()?, &solver.params, solver.config.space())?,
    })
}

/// Runs `config.steps` steps. A failing or non-finite step aborts with the
/// index of the last step that completed.
pub fn run(initial: Initial<'_>, params: ModelParams, config: SolverConfig, output_every: usize) -> Result<Trajectory> {
    let output_every = output_every.max(1);
    let steps = config.steps;
    let mut solver = match initial {
        Initial::State(s) => Solver::new(&s, params, config)?,
        Initial::Solution { solution, grid, t0 } => Solver::from_solution(solution, grid, t0, params, config)?,
    };
    let warnings = solver.warnings()?;
    let mut records = vec![record(&solver)?];
    let mut snapshots = vec![(0, solver.state().layer_state()?)];
    for n in 1..=steps {
        solver.step().map_err(|e| Error::SolverAbort {
            last_healthy_step: n - 1,
            reason: e.to_string(),
        })?;
        if n % output_every == 0 || n == steps {
            records.push(record(&solver)?);
            snapshots.push((n, solver.state().layer_state()?));
        }
    }
    Ok(Trajectory {
        records,
        snapshots,
        final_state: solver.state().layer_state()?,
        warnings,
    })
}

/// Diagnostics time series; the circulation columns sum both layers.
pub fn write_csv(records: &[Record]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let d = &r.diagnostics;
        let _ = writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.step,
            r.t,
            d.energy,
            d.enstrophy1,
            d.enstrophy2,
            d.circulation_south[0] + d.circulation_south[1],
            d.circulation_north[0] + d.circulation_north[1],
        );
    }
    out
}
