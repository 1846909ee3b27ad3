use std::fmt;

use crate::error::{Error, Result};
use crate::model::ExactSolution;

use super::timefn::TimeFn;

/// Element of the point symmetry group acting on `(t, x, y, ψ⁺, ψ⁻)`:
///
/// ```text
/// t̃ = ε₁t + T₀,   x̃ = ε₁x + f(t),   ỹ = ε₂y + Y₀,
/// ψ̃⁻ = ε₃ψ⁻ + Ψ₀,   ψ̃⁺ = ε₂ψ⁺ − 2ε₁ε₂ f′(t) y + g(t)
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct PointTransform {
    pub eps1: i8,
    pub eps2: i8,
    pub eps3: i8,
    pub t0: f64,
    pub y0: f64,
    pub psi0: f64,
    pub f: TimeFn,
    pub g: TimeFn,
}

impl Default for PointTransform {
    fn default() -> Self {
        PointTransform::identity()
    }
}

fn check_sign(name: &str, e: i8) -> Result<()> {
    if e == 1 || e == -1 {
        Ok(())
    } else {
        Err(Error::branch(&format!("{name} = ±1"), format!("{name} = {e}")))
    }
}

impl PointTransform {
    pub fn identity() -> Self {
        PointTransform {
            eps1: 1,
            eps2: 1,
            eps3: 1,
            t0: 0.0,
            y0: 0.0,
            psi0: 0.0,
            f: TimeFn::zero(),
            g: TimeFn::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_sign("eps1", self.eps1)?;
        check_sign("eps2", self.eps2)?;
        check_sign("eps3", self.eps3)?;
        for (name, v) in [("T0", self.t0), ("Y0", self.y0), ("Psi0", self.psi0)] {
            if !v.is_finite() {
                return Err(Error::branch(&format!("{name} finite"), format!("{name} = {v}")));
            }
        }
        Ok(())
    }

    pub fn time_shift(t0: f64) -> Self {
        PointTransform { t0, ..Self::identity() }
    }

    pub fn y_shift(y0: f64) -> Self {
        PointTransform { y0, ..Self::identity() }
    }

    /// `x̃ = x + f(t)`
    pub fn x_map(f: TimeFn) -> Self {
        PointTransform { f, ..Self::identity() }
    }

    /// Galilean boost `x̃ = x + c t`.
    pub fn boost(c: f64) -> Self {
        Self::x_map(TimeFn::linear(c))
    }

    pub fn gauge(g: TimeFn) -> Self {
        PointTransform { g, ..Self::identity() }
    }

    pub fn baroclinic_shift(psi0: f64) -> Self {
        PointTransform { psi0, ..Self::identity() }
    }

    fn e(v: i8) -> f64 {
        f64::from(v)
    }

    /// Old coordinates of the point `(t̃, x̃, ỹ)`.
    pub fn pull_back_point(&self, tt: f64, xt: f64, yt: f64) -> (f64, f64, f64) {
        let (e1, e2) = (Self::e(self.eps1), Self::e(self.eps2));
        let t = e1 * (tt - self.t0);
        let x = e1 * (xt - self.f.eval(t));
        let y = e2 * (yt - self.y0);
        (t, x, y)
    }

    /// New `(ψ̃⁺, ψ̃⁻)` from old values at old coordinates.
    pub fn map_values(&self, t: f64, y: f64, plus: f64, minus: f64) -> (f64, f64) {
        let (e1, e2, e3) = (Self::e(self.eps1), Self::e(self.eps2), Self::e(self.eps3));
        let fp = self.f.derivative().eval(t);
        let new_plus = e2 * plus - 2.0 * e1 * e2 * fp * y + self.g.eval(t);
        let new_minus = e3 * minus + self.psi0;
        (new_plus, new_minus)
    }

    /// Applies `self` first and then `next`.
    pub fn then(&self, next: &PointTransform) -> PointTransform {
        let e1a = Self::e(self.eps1);
        let (e1b, e2b, e3b) = (Self::e(next.eps1), Self::e(next.eps2), Self::e(next.eps3));
        // t₁ = ε₁ᵃ t + T₀ᵃ
        let fb_at = next.f.affine_arg(e1a, self.t0);
        let fbp_at = next.f.derivative().affine_arg(e1a, self.t0);
        let gb_at = next.g.affine_arg(e1a, self.t0);
        PointTransform {
            eps1: self.eps1 * next.eps1,
            eps2: self.eps2 * next.eps2,
            eps3: self.eps3 * next.eps3,
            t0: e1b * self.t0 + next.t0,
            y0: e2b * self.y0 + next.y0,
            psi0: e3b * self.psi0 + next.psi0,
            f: self.f.scale(e1b).add(&fb_at),
            g: self
                .g
                .scale(e2b)
                .add(&fbp_at.scale(-2.0 * e1b * e2b * self.y0))
                .add(&gb_at),
        }
    }

    /// `next ∘ self` in function notation.
    pub fn compose(first: &PointTransform, second: &PointTransform) -> PointTransform {
        first.then(second)
    }

    pub fn inverse(&self) -> PointTransform {
        let (e1, e2, e3) = (Self::e(self.eps1), Self::e(self.eps2), Self::e(self.eps3));
        // old t in terms of new t′: t = ε₁t′ − ε₁T₀
        let f_at = self.f.affine_arg(e1, -e1 * self.t0);
        let fp_at = self.f.derivative().affine_arg(e1, -e1 * self.t0);
        let g_at = self.g.affine_arg(e1, -e1 * self.t0);
        PointTransform {
            eps1: self.eps1,
            eps2: self.eps2,
            eps3: self.eps3,
            t0: -e1 * self.t0,
            y0: -e2 * self.y0,
            psi0: -e3 * self.psi0,
            f: f_at.scale(-e1),
            g: fp_at.scale(-2.0 * e1 * e2 * self.y0).add(&g_at.scale(-e2)),
        }
    }

    /// Whether all parameters are those of the identity, up to round-off.
    pub fn is_identity(&self) -> bool {
        let tiny = |v: f64| v.abs() < 1e-12;
        self.eps1 == 1
            && self.eps2 == 1
            && self.eps3 == 1
            && tiny(self.t0)
            && tiny(self.y0)
            && tiny(self.psi0)
            && self.f.is_zero()
            && self.g.is_zero()
    }
}

impl fmt::Display for PointTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "eps=({},{},{}) T0={} Y0={} Psi0={} f(t)={} g(t)={}",
            self.eps1, self.eps2, self.eps3, self.t0, self.y0, self.psi0, self.f, self.g
        )
    }
}

/// A solution carried along by a [`PointTransform`].
pub struct Transformed<S> {
    pub transform: PointTransform,
    pub inner: S,
}

impl<S: ExactSolution> ExactSolution for Transformed<S> {
    fn name(&self) -> String {
        format!("transformed({})", self.inner.name())
    }

    fn eval(&self, tt: f64, xt: f64, yt: f64) -> Result<(f64, f64)> {
        let (t, x, y) = self.transform.pull_back_point(tt, xt, yt);
        let (p1, p2) = self.inner.eval(t, x, y)?;
        let (plus, minus) = self.transform.map_values(t, y, p1 + p2, p1 - p2);
        Ok((0.5 * (plus + minus), 0.5 * (plus - minus)))
    }
}

pub fn apply_to_solution<S: ExactSolution>(tr: &PointTransform, s: S) -> Result<Transformed<S>> {
    tr.validate()?;
    Ok(Transformed { transform: tr.clone(), inner: s })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ExpPoly;

    struct Probe;

    impl ExactSolution for Probe {
        fn name(&self) -> String {
            "probe".into()
        }
        fn eval(&self, t: f64, x: f64, y: f64) -> Result<(f64, f64)> {
            Ok(((x + 2.0 * y + 0.5 * t).sin() + y * y, (x - t).cos() * y))
        }
    }

    fn tf(s: &str) -> TimeFn {
        TimeFn::from(&s.parse::<ExpPoly>().unwrap())
    }

    fn sample(tr: &PointTransform) -> PointTransform {
        PointTransform { eps2: -1, y0: 0.4, t0: -0.3, psi0: 1.5, g: tf("t^2 - exp(t)"), ..tr.clone() }
    }

    fn agree(a: &dyn ExactSolution, b: &dyn ExactSolution) {
        for (t, x, y) in [(0.1, 0.2, 0.3), (-0.7, 1.1, -0.4), (1.3, -2.0, 0.9)] {
            let (u1, u2) = a.eval(t, x, y).unwrap();
            let (v1, v2) = b.eval(t, x, y).unwrap();
            assert!((u1 - v1).abs() < 1e-12 && (u2 - v2).abs() < 1e-12, "{u1} {v1} {u2} {v2}");
        }
    }

    #[test]
    fn identity_leaves_solution_unchanged() {
        let t = apply_to_solution(&PointTransform::identity(), Probe).unwrap();
        agree(&t, &Probe);
    }

    #[test]
    fn time_shifts_add() {
        let c = PointTransform::time_shift(1.0).then(&PointTransform::time_shift(2.0));
        assert_eq!(c, PointTransform::time_shift(3.0));
    }

    #[test]
    fn composition_matches_two_steps() {
        let a = PointTransform { eps1: -1, f: tf("t^2"), ..sample(&PointTransform::identity()) };
        let b = PointTransform { eps1: 1, f: tf("t"), y0: -1.2, g: TimeFn::sine(1.0, 2.0, 0.3), ..PointTransform::identity() };
        let two = apply_to_solution(&b, apply_to_solution(&a, Probe).unwrap()).unwrap();
        let one = apply_to_solution(&a.then(&b), Probe).unwrap();
        agree(&two, &one);
    }

    #[test]
    fn inverse_gives_identity() {
        let a = PointTransform { eps1: -1, eps3: -1, f: tf("t^3 + (1 + t)exp(-t)"), ..sample(&PointTransform::identity()) };
        assert!(a.then(&a.inverse()).is_identity());
        assert!(a.inverse().then(&a).is_identity());
    }

    #[test]
    fn gauge_only_moves_barotropic_part() {
        let g = PointTransform::gauge(TimeFn::sine(1.0, 1.0, 0.0));
        let s = apply_to_solution(&g, Probe).unwrap();
        let (a1, a2) = s.eval(0.4, 0.1, 0.2).unwrap();
        let (b1, b2) = Probe.eval(0.4, 0.1, 0.2).unwrap();
        assert!(((a1 + a2) - (b1 + b2) - 0.4f64.sin()).abs() < 1e-14);
        assert!(((a1 - a2) - (b1 - b2)).abs() < 1e-14);
    }

    #[test]
    fn bad_signs_rejected() {
        let t = PointTransform { eps2: 0, ..PointTransform::identity() };
        assert!(apply_to_solution(&t, Probe).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn sign() -> impl Strategy<Value = i8> {
            prop_oneof![Just(1i8), Just(-1i8)]
        }

        fn timefn() -> impl Strategy<Value = TimeFn> {
            (prop::collection::vec(-1.0f64..1.0, 0..4), -0.5f64..0.5, -1.0f64..1.0)
                .prop_map(|(c, s, a)| TimeFn::polynomial(&c).add(&exp_term(s, a)))
        }

        fn exp_term(s: f64, a: f64) -> TimeFn {
            TimeFn::from(&"exp(t)".parse::<ExpPoly>().unwrap()).affine_arg(s, 0.0).scale(a)
        }

        prop_compose! {
            fn transform()(e1 in sign(), e2 in sign(), e3 in sign(), t0 in -1.0f64..1.0, y0 in -1.0f64..1.0,
                           psi0 in -1.0f64..1.0, f in timefn(), g in timefn()) -> PointTransform {
                PointTransform { eps1: e1, eps2: e2, eps3: e3, t0, y0, psi0, f, g }
            }
        }

        fn pointwise(a: &PointTransform, b: &PointTransform) -> bool {
            let (sa, sb) = (apply_to_solution(a, Probe).unwrap(), apply_to_solution(b, Probe).unwrap());
            [(0.1, 0.2, 0.3), (-0.6, 1.1, -0.4), (0.9, -2.0, 0.7)].iter().all(|&(t, x, y)| {
                let (u, v) = (sa.eval(t, x, y).unwrap(), sb.eval(t, x, y).unwrap());
                (u.0 - v.0).abs() < 1e-12 * (1.0 + u.0.abs()) && (u.1 - v.1).abs() < 1e-12 * (1.0 + u.1.abs())
            })
        }

        proptest! {
            #[test]
            fn associative(a in transform(), b in transform(), c in transform()) {
                prop_assert!(pointwise(&a.then(&b).then(&c), &a.then(&b.then(&c))));
            }

            #[test]
            fn inverse_is_pointwise_identity(a in transform()) {
                prop_assert!(pointwise(&a.then(&a.inverse()), &PointTransform::identity()));
            }

            #[test]
            fn central_elements_commute(c in -1.0f64..1.0, d in -1.0f64..1.0, k in -1.0f64..1.0, a in transform()) {
                // the centre acts trivially on the identity component only
                let a = PointTransform { eps1: 1, eps2: 1, eps3: 1, ..a };
                let z = PointTransform { f: TimeFn::constant(c), psi0: d, g: TimeFn::constant(k), ..PointTransform::identity() };
                prop_assert!(pointwise(&a.then(&z), &z.then(&a)));
            }
        }
    }
}
