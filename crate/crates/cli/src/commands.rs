use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use qg_core::algebra::{
    adjoint, commutator, parse_params, subalgebra_closed, AlgebraElement, ExpPoly, Params, Rat, SubalgebraSpec,
    FAMILIES,
};
use qg_core::bvp::{bc_residual, empirical_check_on, transform_preserves_bvp, BoundarySetting, SettingKind};
use qg_core::catalog::{self, CatalogEntry, ParamValues, VerifySetup};
use qg_core::error::{Error, Result};
use qg_core::fields::{io, Field2D, GridSpec};
use qg_core::model::{residual_convergence, Convergence, ExactSolution, ModelParams, Residual};
use qg_core::solver::{run, write_csv, Initial, RunConfig};
use qg_core::transforms::{apply_discrete, apply_to_solution, Discrete, PointTransform, TimeFn};

use crate::format::{combination, num, parse_grid, parse_pair};
use crate::sweep::random_transform;
use crate::{
    AlgebraCmd, BvpCheckArgs, BvpCmd, CatalogCmd, ClosureArgs, Command, DomainArgs, EvalArgs, FieldKind, ModelArgs,
    SetupArgs, SimulateArgs, SolutionArgs, SweepArgs, TransformArgs, TransformSpec, VerifyArgs,
};

type Out<'a> = &'a mut dyn Write;

/// Runs one subcommand; the returned code is the process exit status.
pub fn dispatch(cmd: Command, out: Out) -> Result<u8> {
    match cmd {
        Command::Catalog(CatalogCmd::List { json }) => catalog_list(json, out),
        Command::Catalog(CatalogCmd::Eval(a)) => catalog_eval(&a, out),
        Command::Verify(a) => verify(&a, out),
        Command::Simulate(a) => simulate(&a, out),
        Command::Transform(a) => transform(&a, out),
        Command::Algebra(a) => algebra(a, out),
        Command::Bvp(BvpCmd::Check(a)) => bvp_check(&a, out),
        Command::Bvp(BvpCmd::Sweep(a)) => bvp_sweep(&a, out),
    }
}

fn model(m: &ModelArgs) -> Result<ModelParams> {
    ModelParams::new(m.beta, m.froude)
}

fn resolve(a: &SolutionArgs) -> Result<(&'static CatalogEntry, ParamValues, ModelParams)> {
    let entry = catalog::entry(&a.solution)?;
    Ok((entry, ParamValues::parse(&a.params)?, model(&a.model)?))
}

fn setup(base: VerifySetup, a: &SetupArgs) -> Result<VerifySetup> {
    let mut s = base;
    if let Some(g) = &a.grid {
        (s.nx, s.ny) = parse_grid(g)?;
    }
    if let Some(o) = &a.origin {
        s.origin = parse_pair(o)?;
    }
    s.dt = a.dt.unwrap_or(s.dt);
    s.t = a.t.unwrap_or(s.t);
    s.lx = a.lx.unwrap_or(s.lx);
    s.ly = a.ly.unwrap_or(s.ly);
    Ok(s)
}

fn catalog_list(as_json: bool, out: Out) -> Result<u8> {
    for e in catalog::entries() {
        if as_json {
            let s = e.setup;
            let params: Vec<_> = e
                .params
                .iter()
                .map(|p| json!({"name": p.name, "type": p.kind.to_string(), "default": p.default}))
                .collect();
            let line = json!({
                "name": e.name,
                "origin": e.origin,
                "params": params,
                "setup": {"nx": s.nx, "ny": s.ny, "lx": s.lx, "ly": s.ly,
                          "origin": [s.origin.0, s.origin.1], "t": s.t, "dt": s.dt},
            });
            writeln!(out, "{line}")?;
        } else {
            writeln!(out, "{}\n    params: {}\n    origin: {}", e.name, e.schema(), e.origin)?;
        }
    }
    Ok(0)
}

fn catalog_eval(a: &EvalArgs, out: Out) -> Result<u8> {
    let (entry, values, m) = resolve(&a.solution)?;
    let sol = entry.build(&values, &m)?;
    if let (Some(x), Some(y)) = (a.x, a.y) {
        let (p1, p2) = sol.eval(a.t, x, y)?;
        writeln!(
            out,
            "psi1={} psi2={} plus={} minus={}",
            num(p1),
            num(p2),
            num(p1 + p2),
            num(p1 - p2)
        )?;
        return Ok(0);
    }
    let mut s = entry.setup;
    if let Some(g) = &a.grid {
        (s.nx, s.ny) = parse_grid(g)?;
    }
    let (ox, oy) = match &a.origin {
        Some(o) => parse_pair(o)?,
        None => s.origin,
    };
    let grid = GridSpec::periodic(s.nx, s.ny, a.lx.unwrap_or(s.lx), a.ly.unwrap_or(s.ly))?;
    let pick = a.field;
    let field = Field2D::try_from_fn(grid, |x, y| {
        let (p1, p2) = sol.eval(a.t, x + ox, y + oy)?;
        Ok(match pick {
            FieldKind::Psi1 => p1,
            FieldKind::Psi2 => p2,
            FieldKind::Plus => p1 + p2,
            FieldKind::Minus => p1 - p2,
        })
    })?;
    match &a.out {
        Some(path) => {
            io::write_field(path, &field, a.t)?;
            writeln!(out, "wrote {}", path.display())?;
        }
        None => out.write_all(io::to_text(&field, a.t).as_bytes())?,
    }
    Ok(0)
}

fn residual_json(r: &Residual) -> serde_json::Value {
    json!({"solution": r.name, "nx": r.nx, "ny": r.ny, "h": r.h, "dt": r.dt, "max_res": r.max, "l2_res": r.l2})
}

fn report(c: &Convergence, as_json: bool, out: Out) -> Result<u8> {
    if as_json {
        writeln!(out, "{}", residual_json(&c.coarse))?;
        writeln!(out, "{}", residual_json(&c.fine))?;
        writeln!(out, "{}", json!({"ratio": c.ratio, "exact": c.exact, "passed": c.passed}))?;
    } else {
        writeln!(out, "{}", c.coarse)?;
        writeln!(out, "{}", c.fine)?;
        writeln!(out, "ratio={} exact={} passed={}", num(c.ratio), c.exact, c.passed)?;
    }
    if !c.passed {
        eprintln!("residual did not converge at second order (ratio {:.3} < 3.5)", c.ratio);
    }
    Ok(if c.passed { 0 } else { 1 })
}

fn verify(a: &VerifyArgs, out: Out) -> Result<u8> {
    let (entry, values, m) = resolve(&a.solution)?;
    let s = setup(entry.setup, &a.setup)?;
    let c = entry.verify_on(&values, &m, &s)?;
    report(&c, a.json, out)
}

fn time_fn(text: &Option<String>) -> Result<TimeFn> {
    match text {
        Some(t) => Ok(TimeFn::from_exppoly(&t.parse::<ExpPoly>()?)),
        None => Ok(TimeFn::zero()),
    }
}

fn point_transform(a: &TransformSpec) -> Result<PointTransform> {
    let tr = PointTransform {
        eps1: a.eps1,
        eps2: a.eps2,
        eps3: a.eps3,
        t0: a.t0,
        y0: a.y0,
        psi0: a.psi0,
        f: time_fn(&a.f)?,
        g: time_fn(&a.g)?,
    };
    tr.validate()?;
    Ok(tr)
}

fn transform(a: &TransformArgs, out: Out) -> Result<u8> {
    let (entry, values, m) = resolve(&a.solution)?;
    let tr = point_transform(&a.transform)?;
    let base = entry.build(&values, &m)?;
    let inner: Box<dyn ExactSolution> = match &a.discrete {
        Some(d) => Box::new(apply_discrete(d.parse::<Discrete>()?, base)),
        None => Box::new(base),
    };
    let mapped = apply_to_solution(&tr, inner)?;
    let s = setup(entry.setup, &a.setup)?;
    writeln!(out, "transform: {tr}")?;
    if let Some(d) = &a.discrete {
        writeln!(out, "discrete: {d}")?;
    }
    let c = residual_convergence(&mapped, &m, &s.grid()?, s.origin, s.t, s.dt)?;
    report(&c, false, out)
}

fn element(s: &str) -> Result<AlgebraElement> {
    s.parse()
}

fn rational(s: &str) -> Result<Rat> {
    let c = s
        .parse::<ExpPoly>()?
        .as_constant()
        .and_then(|c| c.as_rat())
        .ok_or_else(|| Error::Parse(format!("expected a rational number, got `{s}`")))?;
    Ok(c)
}

fn closure_params(a: &ClosureArgs) -> Result<Params> {
    let mut p = parse_params(&a.params)?;
    for (k, v) in a.named.pairs() {
        p.insert(k.to_string(), v.parse()?);
    }
    Ok(p)
}

fn algebra(cmd: AlgebraCmd, out: Out) -> Result<u8> {
    match cmd {
        AlgebraCmd::Commutator { u, v } => {
            writeln!(out, "{}", commutator(&element(&u)?, &element(&v)?))?;
        }
        AlgebraCmd::Adjoint { a, eps, target } => {
            writeln!(out, "{}", adjoint(&element(&a)?, &rational(&eps)?, &element(&target)?)?)?;
        }
        AlgebraCmd::Families => {
            for (name, schema, gens) in FAMILIES {
                let names: Vec<_> = schema.iter().map(|(n, _)| *n).collect();
                writeln!(out, "{name}({}): {gens}", names.join(", "))?;
            }
        }
        AlgebraCmd::Closure(a) => {
            let p = closure_params(&a)?;
            let spec = if a.mutated {
                let get = |k: &str| -> Result<Rat> {
                    match p.get(k) {
                        Some(e) => e.as_constant().and_then(|c| c.as_rat()).ok_or_else(|| {
                            Error::Parse(format!("parameter `{k}` must be rational"))
                        }),
                        None => Ok(Rat::from_integer(0.into())),
                    }
                };
                SubalgebraSpec::mutated_a2_2(get("nu")?, get("kappa")?, get("sigma")?)
            } else {
                SubalgebraSpec::new(a.subalgebra.as_deref().unwrap_or_default(), p)?
            };
            let report = subalgebra_closed(&spec)?;
            let mut line = format!("closed: {}", report.closed);
            for ((i, j), coords) in &report.bracket_coords {
                let rhs = match coords {
                    Some(c) => combination(c),
                    None => format!(
                        "{} (outside the span)",
                        commutator(&spec.generators[*i], &spec.generators[*j])
                    ),
                };
                line.push_str(&format!("; [e{},e{}] = {rhs}", i + 1, j + 1));
            }
            writeln!(out, "{line}")?;
            for (k, g) in spec.generators.iter().enumerate() {
                writeln!(out, "e{} = {g}", k + 1)?;
            }
            return Ok(if report.closed { 0 } else { 1 });
        }
    }
    Ok(0)
}

fn domain(kind: SettingKind, d: &DomainArgs) -> Result<(BoundarySetting, usize, usize)> {
    let (nx, ny) = parse_grid(&d.grid)?;
    Ok((BoundarySetting::new(kind, d.half_length, d.width)?, nx, ny))
}

fn bvp_check(a: &BvpCheckArgs, out: Out) -> Result<u8> {
    let (setting, nx, ny) = domain(a.setting.parse()?, &a.domain)?;
    let tr = point_transform(&a.transform)?;
    let v = transform_preserves_bvp(&tr, &setting);
    writeln!(out, "setting: {} L={} Y={}", setting.kind, num(setting.half_length), num(setting.width))?;
    writeln!(out, "transform: {tr}")?;
    writeln!(out, "predicate: {v}")?;
    if a.empirical {
        let e = empirical_check_on(&tr, &setting, nx, ny)?;
        writeln!(out, "empirical: {e}")?;
        if e.preserved != v.preserved {
            eprintln!("predicate and probe disagree");
            return Ok(1);
        }
    }
    Ok(0)
}

fn bvp_sweep(a: &SweepArgs, out: Out) -> Result<u8> {
    let mut code = 0;
    for kind in [SettingKind::Infinite, SettingKind::PeriodicChannel, SettingKind::LimitedRectangle] {
        let (setting, nx, ny) = domain(kind, &a.domain)?;
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        let (mut agree, mut preserved) = (0, 0);
        for _ in 0..a.cases {
            let tr = random_transform(&mut rng, setting.width);
            let v = transform_preserves_bvp(&tr, &setting);
            let e = empirical_check_on(&tr, &setting, nx, ny)?;
            if v.preserved == e.preserved {
                agree += 1;
            } else {
                writeln!(out, "disagreement on {kind}: {tr}: predicate {v} / empirical {e}")?;
                code = 1;
            }
            preserved += usize::from(v.preserved);
        }
        writeln!(out, "setting={kind} seed={} cases={} agree={agree} preserved={preserved}", a.seed, a.cases)?;
    }
    Ok(code)
}

/// Smooth seeded perturbation that vanishes on `y = 0` and `y = Ly`.
struct Perturbed<'a> {
    inner: &'a dyn ExactSolution,
    modes: Vec<(f64, f64, f64, f64, f64)>,
}

impl<'a> Perturbed<'a> {
    fn new(inner: &'a dyn ExactSolution, grid: &GridSpec, amp: f64, seed: u64) -> Self {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (kx, ky) = (std::f64::consts::TAU / grid.lx, std::f64::consts::TAU / grid.ly);
        let modes = (0..6)
            .map(|_| {
                let m = rng.gen_range(1..4) as f64;
                let n = rng.gen_range(1..3) as f64;
                let a1 = amp * rng.gen_range(-1.0..1.0);
                let a2 = amp * rng.gen_range(-1.0..1.0);
                (m * kx, n * ky, a1, a2, rng.gen_range(0.0..std::f64::consts::TAU))
            })
            .collect();
        Perturbed { inner, modes }
    }
}

impl ExactSolution for Perturbed<'_> {
    fn name(&self) -> String {
        format!("perturbed({})", self.inner.name())
    }

    fn eval(&self, t: f64, x: f64, y: f64) -> Result<(f64, f64)> {
        let (mut p1, mut p2) = self.inner.eval(t, x, y)?;
        for &(k, l, a1, a2, phase) in &self.modes {
            let shape = (k * x + phase).cos() * (l * y).sin();
            p1 += a1 * shape;
            p2 += a2 * shape;
        }
        Ok((p1, p2))
    }
}

fn field_path(dir: &Path, layer: usize, step: usize) -> PathBuf {
    dir.join(format!("psi{layer}_{step:06}.txt"))
}

fn simulate(a: &SimulateArgs, out: Out) -> Result<u8> {
    let text = fs::read_to_string(&a.config).map_err(|e| Error::Io(format!("{}: {e}", a.config.display())))?;
    let cfg = RunConfig::parse(&text)?;
    let name = cfg
        .solution
        .as_deref()
        .ok_or_else(|| Error::Config { line: 0, message: "missing `solution`".into() })?;
    let values = cfg.params.iter().fold(ParamValues::new(), |v, (k, x)| v.with(k, x));
    let sol = catalog::build(name, &values, &cfg.model)?;
    let seed = a.seed.unwrap_or(cfg.seed);
    let perturbed = Perturbed::new(&sol, &cfg.grid, cfg.noise, seed);
    let initial: &dyn ExactSolution = if cfg.noise > 0.0 { &perturbed } else { &sol };
    let dir = a
        .out
        .clone()
        .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("qg2l_output"));
    let traj = run(
        Initial::Solution { solution: initial, grid: cfg.grid, t0: cfg.t0 },
        cfg.model,
        cfg.solver.clone(),
        cfg.output_every,
    )?;
    for w in &traj.warnings {
        eprintln!("warning: {w}");
    }
    fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    fs::write(dir.join("diagnostics.csv"), write_csv(&traj.records))?;
    for (step, state) in &traj.snapshots {
        let s = state.to(qg_core::model::Representation::Layered)?;
        io::write_field(&field_path(&dir, 1, *step), &s.first, s.t)?;
        io::write_field(&field_path(&dir, 2, *step), &s.second, s.t)?;
    }
    let first = &traj.records[0].diagnostics;
    let last = &traj.records[traj.records.len() - 1];
    let drift = |a: f64, b: f64| (b - a).abs() / a.abs().max(f64::MIN_POSITIVE);
    writeln!(
        out,
        "steps={} t={} energy={} energy_drift={} enstrophy1_drift={} enstrophy2_drift={}",
        last.step,
        num(last.t),
        num(last.diagnostics.energy),
        num(drift(first.energy, last.diagnostics.energy)),
        num(drift(first.enstrophy1, last.diagnostics.enstrophy1)),
        num(drift(first.enstrophy2, last.diagnostics.enstrophy2)),
    )?;
    if let (Some(setting), [.., (_, prev), (_, fin)]) = (cfg.setting, traj.snapshots.as_slice()) {
        let r = bc_residual(fin, &setting, prev, fin.t - prev.t)?;
        writeln!(out, "boundary: {r}")?;
    }
    writeln!(out, "output: {}", dir.display())?;
    Ok(0)
}
