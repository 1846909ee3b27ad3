mod commands;
mod format;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use qg_core::catalog;
use qg_core::error::Error;

#[derive(Parser)]
#[command(
    name = "qg2l",
    version,
    about = "Two-layer quasi-geostrophic model: exact solutions, symmetries, verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List or evaluate closed-form solutions.
    #[command(subcommand)]
    Catalog(CatalogCmd),
    /// Residual convergence of a catalog entry under grid and time-step halving.
    Verify(VerifyArgs),
    /// Time-step the model from a `key = value` run file.
    Simulate(SimulateArgs),
    /// Map a catalog solution through a point symmetry and re-verify it.
    Transform(TransformArgs),
    /// Exact computations in the symmetry algebra.
    #[command(subcommand)]
    Algebra(AlgebraCmd),
    /// Boundary-value-problem compatibility of point symmetries.
    #[command(subcommand)]
    Bvp(BvpCmd),
}

#[derive(Args, Clone, Copy)]
struct ModelArgs {
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Interfacial Froude number.
    #[arg(long = "F", alias = "froude", default_value_t = 1.0)]
    froude: f64,
}

#[derive(Args)]
struct SolutionArgs {
    /// Catalog entry name.
    #[arg(long)]
    solution: String,
    /// Parameter overrides, `name=value,...`.
    #[arg(long, alias = "solution-params", default_value = "")]
    params: String,
    #[command(flatten)]
    model: ModelArgs,
}

/// Overrides of an entry's default verification setup.
#[derive(Args)]
struct SetupArgs {
    /// Coarse grid, `NXxNY`.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    #[arg(long)]
    lx: Option<f64>,
    #[arg(long)]
    ly: Option<f64>,
    /// Lower-left corner, `x0,y0`.
    #[arg(long, allow_hyphen_values = true)]
    origin: Option<String>,
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// Names, parameter schemas and origins.
    List {
        /// One JSON object per line.
        #[arg(long)]
        json: bool,
    },
    /// Evaluate at a point, or sample on a grid and write a field file.
    Eval(EvalArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldKind {
    Psi1,
    Psi2,
    Plus,
    Minus,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    solution: SolutionArgs,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t: f64,
    #[arg(long, allow_negative_numbers = true, requires = "y")]
    x: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "x")]
    y: Option<f64>,
    /// Sampling grid `NXxNY` (defaults to the entry's verification grid).
    #[arg(long, conflicts_with = "x")]
    grid: Option<String>,
    #[arg(long)]
    lx: Option<f64>,
    #[arg(long)]
    ly: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    origin: Option<String>,
    #[arg(long, value_enum, default_value = "psi1")]
    field: FieldKind,
    /// Field file to write; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    solution: SolutionArgs,
    #[command(flatten)]
    setup: SetupArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Run file with `key = value` lines.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Perturbation seed (overrides `seed`).
    #[arg(long)]
    seed: Option<u64>,
}

/// Parameters of a point transformation.
#[derive(Args, Clone)]
struct TransformSpec {
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    eps1: i8,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    eps2: i8,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    eps3: i8,
    /// Time shift.
    #[arg(long = "T0", alias = "t0", default_value_t = 0.0, allow_negative_numbers = true)]
    t0: f64,
    /// y shift.
    #[arg(long = "Y0", alias = "y0", default_value_t = 0.0, allow_negative_numbers = true)]
    y0: f64,
    /// Shift of the baroclinic stream function.
    #[arg(long = "Psi0", alias = "psi0", default_value_t = 0.0, allow_negative_numbers = true)]
    psi0: f64,
    /// x displacement f(t), e.g. `t^2` or `2*exp(t)`.
    #[arg(long, allow_hyphen_values = true)]
    f: Option<String>,
    /// Gauge g(t) added to the barotropic stream function.
    #[arg(long, allow_hyphen_values = true)]
    g: Option<String>,
}

#[derive(Args)]
struct TransformArgs {
    #[command(flatten)]
    solution: SolutionArgs,
    #[command(flatten)]
    transform: TransformSpec,
    /// Discrete symmetry applied before the point transformation:
    /// mirror_tx, mirror_y or layer_swap.
    #[arg(long)]
    discrete: Option<String>,
    #[command(flatten)]
    setup: SetupArgs,
}

#[derive(Subcommand)]
enum AlgebraCmd {
    /// `[u, v]`
    Commutator {
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
    },
    /// `exp(eps ad a) target`
    Adjoint {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        /// Rational group parameter, e.g. `1/2`.
        #[arg(long, allow_hyphen_values = true)]
        eps: String,
        #[arg(long, allow_hyphen_values = true)]
        target: String,
    },
    /// Whether a subalgebra family instance is closed under the bracket.
    Closure(ClosureArgs),
    /// Subalgebra families with their parameters and generators.
    Families,
}

#[derive(Args)]
struct ClosureArgs {
    /// Family name such as A1_1 or A2_2; `algebra families` lists them.
    #[arg(long, required_unless_present = "mutated")]
    subalgebra: Option<String>,
    /// Use the deliberately broken variant of A2_2 (nu, kappa, sigma).
    #[arg(long)]
    mutated: bool,
    /// All parameters at once, `nu=1,sigma=2`.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    params: String,
    #[command(flatten)]
    named: NamedParams,
}

macro_rules! named_params {
    ($($field:ident),*) => {
        #[derive(Args, Default)]
        struct NamedParams {
            $(
                #[arg(long, allow_hyphen_values = true)]
                $field: Option<String>,
            )*
        }

        impl NamedParams {
            fn pairs(&self) -> Vec<(&'static str, &str)> {
                let mut out = Vec::new();
                $(
                    if let Some(v) = &self.$field {
                        out.push((stringify!($field), v.as_str()));
                    }
                )*
                out
            }
        }
    };
}

named_params!(a, b, f, f1, f2, g, g1, g2, kappa, mu, nu, rho, sigma);

#[derive(Subcommand)]
enum BvpCmd {
    /// Predicate verdict, optionally confirmed on a probe solution.
    Check(BvpCheckArgs),
    /// Random transformations checked in both modes on every setting.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct DomainArgs {
    /// Half-length of the domain in x.
    #[arg(long = "L", default_value_t = 2.0)]
    half_length: f64,
    /// Channel width.
    #[arg(long = "Y", default_value_t = 1.5)]
    width: f64,
    /// Probe grid `NXxNY`.
    #[arg(long, default_value = "64x32")]
    grid: String,
}

#[derive(Args)]
struct BvpCheckArgs {
    /// infinite, periodic or rectangle.
    #[arg(long)]
    setting: String,
    #[command(flatten)]
    domain: DomainArgs,
    #[command(flatten)]
    transform: TransformSpec,
    #[arg(long)]
    empirical: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    cases: usize,
    #[command(flatten)]
    domain: DomainArgs,
}

fn exit_code(e: &Error) -> u8 {
    if e.is_domain() || matches!(e, Error::Io(_)) {
        1
    } else {
        2
    }
}

fn entry_listing() -> String {
    let mut s = String::from("Catalog entries:\n");
    for e in catalog::entries() {
        s.push_str(&format!("  {:<26} {}\n", e.name, e.origin));
    }
    s
}

fn main() -> ExitCode {
    let cmd = Cli::command().after_help(entry_listing());
    let cli = match cmd.try_get_matches().and_then(|m| Cli::from_arg_matches(&m)) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let mut out = std::io::stdout().lock();
    match commands::dispatch(cli.command, &mut out) {
        Ok(code) => ExitCode::from(code),
        // a closed pipe (e.g. `| head`) is not a failure
        Err(Error::Io(msg)) if msg.contains("Broken pipe") => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
