//! Closed-form solutions of the two-layer model, the reduced systems they
//! come from, and the auxiliary constructions around them.

mod chain;
mod ode;
mod params;
mod planar;
mod polynomial;
pub mod quad;
mod reduced;
mod solution;
pub mod special;
mod two_dim;
mod waves;
mod whittaker;

use crate::error::{Error, Result};
use crate::fields::GridSpec;
use crate::model::{residual_convergence, Convergence, ModelParams};

pub use chain::{extended_reduction_chain, Chain};
pub use ode::rk4;
pub use params::{ParamSpec, ParamType, ParamValues};
pub use polynomial::{polynomial_solutions, LinearThirdOrder, PolynomialKernel};
pub use reduced::{
    reduced_convergence, reduced_residual, reduced_system, reduced_systems, Jet, ReducedConvergence, ReducedReport,
    ReducedSystem, SampleBox,
};
pub use solution::{Solution, GUARD};
pub use waves::{baroclinic_frequency, barotropic_frequency};
pub use whittaker::{whittaker_indices, whittaker_profile, whittaker_series, WhittakerPoint};

use params::{func, int, real, Resolved};

/// Grid, offset and time step on which an entry is checked by default.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifySetup {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub origin: (f64, f64),
    pub t: f64,
    pub dt: f64,
}

impl VerifySetup {
    const fn square(n: usize, l: f64, origin: (f64, f64), t: f64, dt: f64) -> Self {
        VerifySetup { nx: n, ny: n, lx: l, ly: l, origin, t, dt }
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::periodic(self.nx, self.ny, self.lx, self.ly)
    }
}

type Builder = fn(&Resolved, &ModelParams) -> Result<Solution>;

pub struct CatalogEntry {
    pub name: &'static str,
    /// Which reduction produced the formula.
    pub origin: &'static str,
    pub params: &'static [ParamSpec],
    pub setup: VerifySetup,
    build: Builder,
}

impl CatalogEntry {
    pub fn build(&self, given: &ParamValues, model: &ModelParams) -> Result<Solution> {
        let r = Resolved::new(self.name, self.params, given)?;
        (self.build)(&r, model)
    }

    /// `name:type=default` for every parameter.
    pub fn schema(&self) -> String {
        self.params
            .iter()
            .map(|p| format!("{}:{}={}", p.name, p.kind, p.default))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Residual convergence on the entry's default setup.
    pub fn verify(&self, given: &ParamValues, model: &ModelParams) -> Result<Convergence> {
        self.verify_on(given, model, &self.setup)
    }

    pub fn verify_on(&self, given: &ParamValues, model: &ModelParams, setup: &VerifySetup) -> Result<Convergence> {
        let s = self.build(given, model)?;
        residual_convergence(&s, model, &setup.grid()?, setup.origin, setup.t, setup.dt)
    }
}

const AMPLITUDES: [ParamSpec; 4] = [real("c1", "1"), real("c2", "0.5"), real("c3", "0"), real("c4", "0")];

static ENTRIES: [CatalogEntry; 13] = [
    CatalogEntry {
        name: "rossby_wave",
        origin: "classic barotropic and baroclinic Rossby waves (constant-direction travelling wave)",
        params: &[
            real("k", "3"),
            real("l", "2"),
            real("amp_bt", "1"),
            real("amp_bc", "0.5"),
            real("phase_bt", "0"),
            real("phase_bc", "0"),
        ],
        setup: VerifySetup::square(32, std::f64::consts::TAU, (0.0, 0.0), 0.3, 0.1),
        build: waves::rossby_wave,
    },
    CatalogEntry {
        name: "generalized_wave",
        origin: "travelling wave along x - f(t) y, reduction by dy + X(f)",
        params: &[func("f", "t/2 + 1/4 t^2"), real("k", "2"), real("amp_bt", "1"), real("amp_bc", "1")],
        setup: VerifySetup::square(16, 2.0, (-1.0, -1.0), 0.4, 0.02),
        build: waves::generalized_wave,
    },
    CatalogEntry {
        name: "a12_constant_coefficient",
        origin: "constant-coefficient third-order reduction of the baroclinic equation, f constant",
        params: &[real("f", "0.5"), real("s_re", "0"), real("s_im", "2"), real("kappa", "0.7"), real("amp", "1")],
        setup: VerifySetup::square(16, 3.0, (0.0, 0.0), 0.2, 0.05),
        build: waves::constant_coefficient,
    },
    CatalogEntry {
        name: "a13_decoupled",
        origin: "general solution of the decoupled reduction by X(f) + Z(g)",
        params: &[
            func("f", "1 + t/2"),
            func("g", "t"),
            real("amp1", "1"),
            real("amp2", "1"),
            func("theta1", "t^2"),
            func("theta2", "exp(-t)"),
        ],
        setup: VerifySetup::square(16, 1.0, (-0.5, -0.5), 0.3, 0.02),
        build: planar::a13_decoupled,
    },
    CatalogEntry {
        name: "a21_constant_wind",
        origin: "stationary reduction, case rho = mu = 0: constant wind in both layers",
        params: &[real("kappa", "1"), real("nu", "0.5"), real("c1", "0"), real("c2", "0")],
        setup: VerifySetup::square(16, 2.0, (-1.0, -1.0), 0.5, 0.1),
        build: two_dim::a21_constant_wind,
    },
    CatalogEntry {
        name: "a21_exponential",
        origin: "stationary reduction, case rho = ±mu with mu > 0",
        params: &[
            real("kappa", "1"),
            real("nu", "0.5"),
            real("mu", "0.5"),
            real("rho", "0.5"),
            AMPLITUDES[0],
            AMPLITUDES[1],
            AMPLITUDES[2],
            AMPLITUDES[3],
        ],
        setup: VerifySetup::square(16, 2.0, (-1.0, -1.0), 0.5, 0.1),
        build: two_dim::a21_exponential,
    },
    CatalogEntry {
        name: "a21_stationary_wave",
        origin: "stationary reduction, case rho = ±mu with mu < 0: Rossby wave in one layer",
        params: &[
            real("kappa", "1"),
            real("nu", "0.5"),
            real("mu", "-1"),
            real("rho", "-1"),
            AMPLITUDES[0],
            AMPLITUDES[1],
            AMPLITUDES[2],
            AMPLITUDES[3],
        ],
        setup: VerifySetup::square(16, 4.0, (-2.0, -2.0), 0.5, 0.1),
        build: two_dim::a21_stationary_wave,
    },
    CatalogEntry {
        name: "a21_general",
        origin: "stationary reduction, nonsingular rho != ±mu, integrated numerically",
        params: &[
            real("kappa", "1"),
            real("nu", "0.5"),
            real("mu", "0.3"),
            real("rho", "0.8"),
            real("v1", "1"),
            real("v2", "0"),
            real("dv1", "0"),
            real("dv2", "0.5"),
        ],
        setup: VerifySetup::square(16, 2.0, (-1.0, -1.0), 0.5, 0.1),
        build: two_dim::a21_general,
    },
    CatalogEntry {
        name: "a22_exponential_integral",
        origin: "reduction by dt + nu dy + kappa F and X(exp(sigma t)) + Z(nu sigma t exp(sigma t))",
        params: &[
            real("nu", "1"),
            real("sigma", "0.5"),
            real("kappa", "1"),
            real("c1", "0"),
            real("c2", "0"),
            real("c3", "0"),
            real("c4", "0"),
            real("c5", "0"),
            real("c6", "0"),
        ],
        setup: VerifySetup::square(16, 1.0, (-0.5, -0.5), 0.3, 0.05),
        build: two_dim::a22_exponential_integral,
    },
    CatalogEntry {
        name: "a23_trigonometric",
        origin: "reduction by dt + nu dy + kappa F and X(1) + Z(mu) + rho F, gamma2/gamma1 > 0",
        params: &[
            real("nu", "1"),
            real("mu", "0.5"),
            real("kappa", "1"),
            real("rho", "1"),
            real("c1", "0.1"),
            real("c2", "0.2"),
            real("c3", "0.3"),
            real("c4", "0.4"),
            real("amp_a", "1"),
            real("amp_b", "0.5"),
        ],
        setup: VerifySetup::square(16, 2.0, (-1.0, -1.0), 0.3, 0.05),
        build: two_dim::a23_trigonometric,
    },
    CatalogEntry {
        name: "a23_exponential",
        origin: "reduction by dt + nu dy + kappa F and X(1) + Z(mu) + rho F, gamma2/gamma1 < 0",
        params: &[
            real("nu", "2"),
            real("mu", "0"),
            real("kappa", "1"),
            real("rho", "1"),
            real("c1", "0.1"),
            real("c2", "0.2"),
            real("c3", "0.3"),
            real("c4", "0.4"),
            real("amp_a", "1"),
            real("amp_b", "0.5"),
        ],
        setup: VerifySetup::square(16, 1.0, (-0.5, -0.5), 0.3, 0.05),
        build: two_dim::a23_exponential,
    },
    CatalogEntry {
        name: "a24_polynomial",
        origin: "reduction by dy + X(f) + kappa F and X(1) + Z(g) + rho F, g = f''/beta",
        params: &[
            func("f", "t^2"),
            real("kappa", "0"),
            real("rho", "0.5"),
            func("theta", "t^3"),
            real("c", "0"),
            func("g", "0"),
        ],
        setup: VerifySetup::square(16, 2.0, (-1.0, -1.0), 0.5, 0.1),
        build: two_dim::a24_polynomial,
    },
    CatalogEntry {
        name: "appendix_chain",
        origin: "extended reduction with a Jordan-block symmetry, lifted with constant direction",
        params: &[
            int("m", "3"),
            int("index", "3"),
            real("a", "1"),
            real("lambda_re", "1"),
            real("lambda_im", "0"),
            real("c1", "1"),
            real("c2", "1"),
            real("c3", "1"),
            int("imag", "0"),
        ],
        setup: VerifySetup::square(16, 1.0, (0.0, 0.0), 0.3, 0.05),
        build: chain::chain_solution,
    },
];

pub fn entries() -> &'static [CatalogEntry] {
    &ENTRIES
}

pub fn entry(name: &str) -> Result<&'static CatalogEntry> {
    ENTRIES
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownName(format!("solution `{name}`")))
}

pub fn build(name: &str, given: &ParamValues, model: &ModelParams) -> Result<Solution> {
    entry(name)?.build(given, model)
}

/// `(ψ¹, ψ²)` of a catalog entry at one point.
pub fn eval_solution(
    name: &str,
    given: &ParamValues,
    model: &ModelParams,
    t: f64,
    x: f64,
    y: f64,
) -> Result<(f64, f64)> {
    use crate::model::ExactSolution;
    build(name, given, model)?.eval(t, x, y)
}
