use std::f64::consts::{PI, TAU};

use super::*;
use crate::catalog::{self, ParamValues};
use crate::fields::GridSpec;
use crate::transforms::{apply_to_solution, PointTransform};

fn square(n: usize) -> GridSpec {
    GridSpec::periodic(n, n, TAU, TAU).unwrap()
}

fn wave(k: f64, l: f64, bt: f64, bc: f64) -> catalog::Solution {
    let v = ParamValues::new().with("k", k).with("l", l).with("amp_bt", bt).with("amp_bc", bc);
    catalog::build("rossby_wave", &v, &ModelParams::default()).unwrap()
}

fn exact_state(sol: &dyn ExactSolution, grid: GridSpec, t: f64) -> LayerState {
    let (s, bg) = sample_solution(sol, grid, t).unwrap();
    let plus = s.first.add(&Background::field(bg.plus, grid)).unwrap();
    let minus = s.second.add(&Background::field(bg.minus, grid)).unwrap();
    LayerState::barotropic_baroclinic(t, plus, minus).unwrap()
}

fn max_diff(a: &LayerState, b: &LayerState) -> f64 {
    let a = a.to(Representation::BarotropicBaroclinic).unwrap();
    let b = b.to(Representation::BarotropicBaroclinic).unwrap();
    a.first.sub(&b.first).unwrap().max_abs().max(a.second.sub(&b.second).unwrap().max_abs())
}

fn relative_drift(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs()
}

#[test]
fn zero_state_is_a_fixed_point() {
    let g = square(16);
    let z = LayerState::layered(0.0, Field2D::zeros(g), Field2D::zeros(g)).unwrap();
    let tr = run(Initial::State(z), ModelParams::default(), SolverConfig::rk4(0.1, 20), 5).unwrap();
    assert!(tr.snapshots.iter().all(|(_, s)| s.first.max_abs() == 0.0 && s.second.max_abs() == 0.0));
    let d = tr.records.last().unwrap().diagnostics;
    assert_eq!(d, Diagnostics::default());
    assert_eq!(tr.records.len(), 5);
}

#[test]
fn zero_steps_echo_the_initial_state() {
    let g = square(16);
    let s = exact_state(&wave(3.0, 2.0, 1.0, 0.5), g, 0.2);
    let cfg = SolverConfig { steps: 0, ..SolverConfig::rk4(0.1, 0) };
    let tr = run(Initial::State(s.clone()), ModelParams::default(), cfg, 1).unwrap();
    assert_eq!(tr.final_state, s);
    assert_eq!(tr.records.len(), 1);
}

#[test]
fn constant_wind_stays_steady() {
    let m = ModelParams::default();
    let sol = catalog::build("a21_constant_wind", &ParamValues::new().with("c1", 0.3), &m).unwrap();
    let g = GridSpec::periodic(16, 16, 2.0, 2.0).unwrap();
    let mut solver = Solver::from_solution(&sol, g, 0.0, m, SolverConfig::rk4(0.01, 1000)).unwrap();
    assert!(!solver.state().background.is_zero());
    for _ in 0..1000 {
        solver.step().unwrap();
    }
    let t = solver.state().t;
    let exact = exact_state(&sol, g, t);
    let got = solver.state().layer_state().unwrap();
    let scale = exact.first.max_abs().max(exact.second.max_abs());
    assert!(max_diff(&got, &exact) / scale < 1e-8, "drift {}", max_diff(&got, &exact) / scale);
}

fn fitted_speed(bt: f64, bc: f64, k: f64, l: f64) -> f64 {
    let sol = wave(k, l, bt, bc);
    let cfg = SolverConfig { spectral: true, ..SolverConfig::rk4(0.05, 500) };
    let tr = run(
        Initial::Solution { solution: &sol, grid: square(32), t0: 0.0 },
        ModelParams::default(),
        cfg,
        10,
    )
    .unwrap();
    let samples: Vec<(f64, Field2D)> = tr
        .snapshots
        .iter()
        .map(|(_, s)| {
            let s = s.to(Representation::BarotropicBaroclinic).unwrap();
            (s.t, if bt != 0.0 { s.first } else { s.second })
        })
        .collect();
    fit_phase_speed(&samples, k, l).unwrap()
}

#[test]
fn small_barotropic_wave_has_the_linear_phase_speed() {
    let c = fitted_speed(1e-3, 0.0, 3.0, 2.0);
    let expected = -1.0 / 13.0;
    assert!(relative_drift(expected, c) < 0.01, "{c} vs {expected}");
}

#[test]
fn small_baroclinic_wave_has_the_linear_phase_speed() {
    let c = fitted_speed(0.0, 1e-3, 3.0, 2.0);
    let expected = -1.0 / 15.0;
    assert!(relative_drift(expected, c) < 0.01, "{c} vs {expected}");
}

#[test]
fn energy_is_conserved_along_a_resolved_wave() {
    let m = ModelParams::default();
    let sol = wave(3.0, 2.0, 0.05, 0.0);
    let period = TAU / catalog::barotropic_frequency(&m, 3.0, 2.0);
    let tr = run(
        Initial::Solution { solution: &sol, grid: square(32), t0: 0.0 },
        m,
        SolverConfig::rk4(period / 80.0, 100),
        100,
    )
    .unwrap();
    let (a, b) = (&tr.records[0].diagnostics, &tr.records[1].diagnostics);
    assert!(a.energy > 0.0);
    assert!(relative_drift(a.energy, b.energy) < 1e-6);
    assert!(relative_drift(a.enstrophy1, b.enstrophy1) < 1e-6);
    assert!(relative_drift(a.enstrophy2, b.enstrophy2) < 1e-6);
}

#[test]
fn error_against_the_exact_wave_is_second_order() {
    let m = ModelParams::default();
    let sol = wave(1.0, 1.0, 1.0, 0.7);
    let err = |n: usize| {
        let g = square(n);
        let dt = 0.4 * 16.0 / n as f64;
        let steps = (2.0 / dt).round() as usize;
        let tr = run(Initial::Solution { solution: &sol, grid: g, t0: 0.0 }, m, SolverConfig::rk4(dt, steps), steps)
            .unwrap();
        max_diff(&tr.final_state, &exact_state(&sol, g, tr.final_state.t))
    };
    let (coarse, fine) = (err(16), err(32));
    assert!(coarse / fine > 3.5, "{coarse} {fine}");
}

#[test]
fn leapfrog_tracks_the_exact_wave() {
    let m = ModelParams::default();
    let sol = wave(1.0, 1.0, 1.0, 0.7);
    let g = square(32);
    let cfg = SolverConfig { scheme: TimeScheme::LeapfrogRa, ra_filter: 0.01, ..SolverConfig::rk4(0.05, 40) };
    let tr = run(Initial::Solution { solution: &sol, grid: g, t0: 0.0 }, m, cfg, 40).unwrap();
    assert!(max_diff(&tr.final_state, &exact_state(&sol, g, 2.0)) < 0.02);
}

/// Wave standing between the walls `y = 0` and `y = π`.
struct StandingWave {
    k: f64,
    l: f64,
    omega: f64,
}

impl ExactSolution for StandingWave {
    fn name(&self) -> String {
        "standing".into()
    }
    fn eval(&self, t: f64, x: f64, y: f64) -> Result<(f64, f64)> {
        let v = 0.5 * (self.l * y).sin() * (self.k * x + self.omega * t).cos();
        Ok((v, v))
    }
}

#[test]
fn channel_runs_keep_wall_circulation() {
    let m = ModelParams::default();
    let (k, l) = (2.0, 2.0);
    let base = StandingWave { k, l, omega: catalog::barotropic_frequency(&m, k, l) };
    let sol = apply_to_solution(&PointTransform::boost(0.3), &base).unwrap();
    let err = |n: usize| {
        let g = GridSpec::channel(2 * n, n, TAU, PI).unwrap();
        let dt = 0.8 / n as f64;
        let steps = (1.0 / dt).round() as usize;
        let tr = run(Initial::Solution { solution: &sol, grid: g, t0: 0.0 }, m, SolverConfig::rk4(dt, steps), 1)
            .unwrap();
        for w in tr.records.windows(2) {
            let (a, b) = (w[0].diagnostics, w[1].diagnostics);
            for i in 0..2 {
                assert!((a.circulation_south[i] - b.circulation_south[i]).abs() < 1e-8);
                assert!((a.circulation_north[i] - b.circulation_north[i]).abs() < 1e-8);
            }
        }
        let c = tr.records[0].diagnostics.circulation_south;
        assert!((c[0] + 0.3).abs() < 1e-2 && (c[1] + 0.3).abs() < 1e-2, "{c:?}");
        max_diff(&tr.final_state, &exact_state(&sol, g, tr.final_state.t))
    };
    let (coarse, fine) = (err(16), err(32));
    assert!(coarse / fine > 3.5, "{coarse} {fine}");
}

#[test]
fn channel_needs_wall_constant_fields() {
    let m = ModelParams::default();
    let g = GridSpec::channel(16, 8, TAU, PI).unwrap();
    let s = exact_state(&wave(1.0, 1.0, 1.0, 0.0), g, 0.0);
    assert!(matches!(Solver::new(&s, m, SolverConfig::default()), Err(Error::InvalidBranch { .. })));
}

#[test]
fn boosting_commutes_with_evolution() {
    let m = ModelParams::default();
    let g = square(32);
    let sol = wave(2.0, 1.0, 1.0, 0.6);
    let (t1, shift) = (1.0, 3);
    let c = shift as f64 * g.hx() / t1;
    let boosted = apply_to_solution(&PointTransform::boost(c), &sol).unwrap();
    let cfg = SolverConfig { spectral: true, ..SolverConfig::rk4(0.01, 100) };
    let go = |s: &dyn ExactSolution| {
        let mut solver = Solver::from_solution(s, g, 0.0, m, cfg.clone()).unwrap();
        for _ in 0..cfg.steps {
            solver.step().unwrap();
        }
        solver.state().clone()
    };
    let (plain, moved) = (go(&sol), go(&boosted));
    assert_eq!(moved.background.plus, [0.0, -2.0 * c]);
    let translate = |f: &Field2D| {
        let mut out = f.clone();
        for j in 0..g.my() {
            for i in 0..g.mx() {
                out.set(i, j, f.at((i + g.mx() - shift) % g.mx(), j));
            }
        }
        out
    };
    let d_plus = translate(&plain.psi_plus).sub(&moved.psi_plus).unwrap().max_abs();
    let d_minus = translate(&plain.psi_minus).sub(&moved.psi_minus).unwrap().max_abs();
    assert!(d_plus < 1e-8 && d_minus < 1e-8, "{d_plus} {d_minus}");
}

#[test]
fn zonal_barotropic_slope_is_rejected() {
    let g = square(16);
    let s = LayerState::barotropic_baroclinic(0.0, Field2D::zeros(g), Field2D::zeros(g)).unwrap();
    let bg = Background { plus: [1.0, 0.0], minus: [0.0; 2] };
    let r = Solver::with_background(&s, bg, ModelParams::default(), SolverConfig::default());
    assert!(matches!(r, Err(Error::InvalidBranch { .. })));
}

#[test]
fn blow_up_aborts_with_the_last_healthy_step() {
    let g = square(16);
    let f = Field2D::from_fn(g, |x, y| 50.0 * ((3.0 * x).sin() * (5.0 * y).cos() + (x + 2.0 * y).cos()));
    let s = LayerState::layered(0.0, f.clone(), f.scale(-0.3)).unwrap();
    match run(Initial::State(s), ModelParams::default(), SolverConfig::rk4(5.0, 400), 1) {
        Err(Error::SolverAbort { last_healthy_step, .. }) => assert!(last_healthy_step < 400),
        other => panic!("expected an abort, got {:?}", other.map(|t| t.records.len())),
    }
}

#[test]
fn large_steps_are_flagged() {
    let g = square(16);
    let s = exact_state(&wave(3.0, 2.0, 1.0, 0.0), g, 0.0);
    let solver = Solver::new(&s, ModelParams::default(), SolverConfig::rk4(1.0, 1)).unwrap();
    assert_eq!(solver.warnings().unwrap().len(), 1);
    let solver = Solver::new(&s, ModelParams::default(), SolverConfig::rk4(1e-3, 1)).unwrap();
    assert!(solver.warnings().unwrap().is_empty());
}

#[test]
fn single_step_helper_keeps_the_representation() {
    let g = square(16);
    let s = exact_state(&wave(1.0, 2.0, 1.0, 0.4), g, 0.0).to(Representation::Layered).unwrap();
    let next = step(&s, &ModelParams::default(), &SolverConfig::rk4(0.01, 1)).unwrap();
    assert_eq!(next.representation, Representation::Layered);
    assert!((next.t - 0.01).abs() < 1e-15);
}

#[test]
fn csv_has_the_fixed_header() {
    let r = Record { step: 3, t: 0.5, diagnostics: Diagnostics::default() };
    let text = write_csv(&[r]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    assert!(lines.next().unwrap().starts_with("3,5.0000000000000000e-1,"));
}

