use crate::error::Result;
use crate::fields::{dx_with, laplacian_with, poisson_bracket_with, Field2D, Scheme};

use super::ModelParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    /// `(ψ¹, ψ²)`, upper and lower layer.
    Layered,
    /// `(ψ⁺, ψ⁻) = (ψ¹ + ψ², ψ¹ − ψ²)`.
    BarotropicBaroclinic,
}

/// Stream functions of both layers at one instant.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerState {
    pub t: f64,
    pub first: Field2D,
    pub second: Field2D,
    pub representation: Representation,
}

impl LayerState {
    pub fn layered(t: f64, psi1: Field2D, psi2: Field2D) -> Result<Self> {
        psi1.grid().same_as(psi2.grid())?;
        Ok(LayerState { t, first: psi1, second: psi2, representation: Representation::Layered })
    }

    pub fn barotropic_baroclinic(t: f64, plus: Field2D, minus: Field2D) -> Result<Self> {
        plus.grid().same_as(minus.grid())?;
        Ok(LayerState {
            t,
            first: plus,
            second: minus,
            representation: Representation::BarotropicBaroclinic,
        })
    }

    /// Converts to the requested representation.
    pub fn to(&self, repr: Representation) -> Result<LayerState> {
        if repr == self.representation {
            return Ok(self.clone());
        }
        let (a, b) = match repr {
            // ψ⁺ = ψ¹ + ψ², ψ⁻ = ψ¹ − ψ²
            Representation::BarotropicBaroclinic => {
                (self.first.add(&self.second)?, self.first.sub(&self.second)?)
            }
            // ψ¹ = (ψ⁺ + ψ⁻)/2, ψ² = (ψ⁺ − ψ⁻)/2
            Representation::Layered => (
                self.first.add(&self.second)?.scale(0.5),
                self.first.sub(&self.second)?.scale(0.5),
            ),
        };
        Ok(LayerState { t: self.t, first: a, second: b, representation: repr })
    }
}

/// Potential vorticity with the planetary term `βy` removed, which keeps it
/// periodic on periodic grids. The planetary part is added back by callers.
fn relative_pv(state: &LayerState, p: &ModelParams, scheme: Scheme) -> Result<(Field2D, Field2D)> {
    let l1 = laplacian_with(&state.first, scheme)?;
    let l2 = laplacian_with(&state.second, scheme)?;
    let f = p.froude;
    Ok(match state.representation {
        Representation::Layered => {
            let diff = state.first.sub(&state.second)?;
            (l1.axpy(-f, &diff)?, l2.axpy(f, &diff)?)
        }
        Representation::BarotropicBaroclinic => (l1, l2.axpy(-2.0 * f, &state.second)?),
    })
}

/// `(Q¹, Q²)` or `(Q⁺, Q⁻)`, following the state's representation.
pub fn potential_vorticity(state: &LayerState, p: &ModelParams) -> Result<(Field2D, Field2D)> {
    potential_vorticity_with(state, p, Scheme::FiniteDifference)
}

pub fn potential_vorticity_with(
    state: &LayerState,
    p: &ModelParams,
    scheme: Scheme,
) -> Result<(Field2D, Field2D)> {
    let (q1, q2) = relative_pv(state, p, scheme)?;
    let y = Field2D::coord_y(*q1.grid());
    Ok(match state.representation {
        Representation::Layered => (q1.axpy(p.beta, &y)?, q2.axpy(p.beta, &y)?),
        Representation::BarotropicBaroclinic => (q1.axpy(2.0 * p.beta, &y)?, q2),
    })
}

/// Time derivatives of the potential vorticities.
///
/// The planetary gradient enters through `{ψ, βy} = β ψ_x`, so no
/// non-periodic field is differenced on periodic grids.
pub fn tendency(state: &LayerState, p: &ModelParams) -> Result<(Field2D, Field2D)> {
    tendency_with(state, p, Scheme::FiniteDifference)
}

pub fn tendency_with(
    state: &LayerState,
    p: &ModelParams,
    scheme: Scheme,
) -> Result<(Field2D, Field2D)> {
    let (q1, q2) = relative_pv(state, p, scheme)?;
    let (a, b) = (&state.first, &state.second);
    let adv = |psi: &Field2D, q: &Field2D, beta: f64| -> Result<Field2D> {
        poisson_bracket_with(psi, q, scheme)?.axpy(beta, &dx_with(psi, scheme)?)
    };
    match state.representation {
        Representation::Layered => Ok((
            adv(a, &q1, p.beta)?.scale(-1.0),
            adv(b, &q2, p.beta)?.scale(-1.0),
        )),
        Representation::BarotropicBaroclinic => {
            let plus = adv(a, &q1, 2.0 * p.beta)?.add(&adv(b, &q2, 0.0)?)?.scale(-0.5);
            let minus = adv(a, &q2, 0.0)?.add(&adv(b, &q1, 2.0 * p.beta)?)?.scale(-0.5);
            Ok((plus, minus))
        }
    }
}

impl LayerState {
    pub fn check_finite(&self) -> Result<()> {
        self.first.check_finite("first stream function")?;
        self.second.check_finite("second stream function")
    }

    pub fn grid(&self) -> &crate::fields::GridSpec {
        self.first.grid()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::GridSpec;
    use std::f64::consts::PI;

    fn grid(n: usize) -> GridSpec {
        GridSpec::periodic(n, n, 2.0 * PI, 2.0 * PI).unwrap()
    }

    fn err(f: &Field2D, exact: impl Fn(f64, f64) -> f64) -> f64 {
        f.sub(&Field2D::from_fn(*f.grid(), exact)).unwrap().max_abs()
    }

    #[test]
    fn rest_state_pv_is_planetary() {
        let g = grid(16);
        let s = LayerState::layered(0.0, Field2D::zeros(g), Field2D::zeros(g)).unwrap();
        let (q1, q2) = potential_vorticity(&s, &ModelParams::default()).unwrap();
        assert_eq!(err(&q1, |_, y| y), 0.0);
        assert_eq!(err(&q2, |_, y| y), 0.0);
    }

    #[test]
    fn layered_pv_of_sine() {
        let g = grid(64);
        let s = LayerState::layered(0.0, Field2D::from_fn(g, |x, _| x.sin()), Field2D::zeros(g))
            .unwrap();
        let (q1, q2) = potential_vorticity(&s, &ModelParams::default()).unwrap();
        let h2 = g.hx() * g.hx();
        assert!(err(&q1, |x, y| -2.0 * x.sin() + y) < h2);
        assert!(err(&q2, |x, y| x.sin() + y) < h2);
    }

    #[test]
    fn baroclinic_pv_of_sine() {
        let g = grid(64);
        let s = LayerState::barotropic_baroclinic(
            0.0,
            Field2D::zeros(g),
            Field2D::from_fn(g, |x, _| x.sin()),
        )
        .unwrap();
        let p = ModelParams::new(0.7, 1.0).unwrap();
        let (qp, qm) = potential_vorticity(&s, &p).unwrap();
        assert!(err(&qm, |x, _| -3.0 * x.sin()) < g.hx() * g.hx());
        assert!(err(&qp, |_, y| 1.4 * y) < 1e-12);
    }

    #[test]
    fn rest_state_has_no_tendency() {
        let g = grid(16);
        let s = LayerState::layered(0.0, Field2D::zeros(g), Field2D::zeros(g)).unwrap();
        let (a, b) = tendency(&s, &ModelParams::default()).unwrap();
        assert_eq!(a.max_abs() + b.max_abs(), 0.0);
    }

    #[test]
    fn uniform_zonal_flow_is_steady() {
        let g = GridSpec::channel(16, 16, 2.0 * PI, 1.0).unwrap();
        let psi = Field2D::from_fn(g, |_, y| -0.8 * y);
        let s = LayerState::layered(0.0, psi.clone(), psi).unwrap();
        let (a, b) = tendency(&s, &ModelParams::default()).unwrap();
        assert!(a.max_abs() < 1e-12 && b.max_abs() < 1e-12);
    }

    #[test]
    fn representation_round_trip() {
        let g = grid(16);
        let s = LayerState::layered(
            0.3,
            Field2D::from_fn(g, |x, y| (x + 2.0 * y).sin()),
            Field2D::from_fn(g, |x, y| x.cos() * y.sin()),
        )
        .unwrap();
        let back = s
            .to(Representation::BarotropicBaroclinic)
            .unwrap()
            .to(Representation::Layered)
            .unwrap();
        assert!(back.first.sub(&s.first).unwrap().max_abs() < 1e-15);
        assert!(back.second.sub(&s.second).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn tendencies_agree_across_representations() {
        for scheme in [Scheme::FiniteDifference, Scheme::Spectral { dealias: false }] {
            let g = grid(32);
            let p = ModelParams::new(1.3, 0.6).unwrap();
            let s = LayerState::layered(
                0.0,
                Field2D::from_fn(g, |x, y| (x + 2.0 * y).sin() + 0.5 * (3.0 * x).cos()),
                Field2D::from_fn(g, |x, y| x.cos() * y.sin() - (2.0 * y).cos()),
            )
            .unwrap();
            let (t1, t2) = tendency_with(&s, &p, scheme).unwrap();
            let pm = s.to(Representation::BarotropicBaroclinic).unwrap();
            let (tp, tm) = tendency_with(&pm, &p, scheme).unwrap();
            // Q⁺ = Q¹ + Q², Q⁻ = Q¹ − Q²
            assert!(tp.sub(&t1.add(&t2).unwrap()).unwrap().max_abs() < 1e-10);
            assert!(tm.sub(&t1.sub(&t2).unwrap()).unwrap().max_abs() < 1e-10);
        }
    }
}
