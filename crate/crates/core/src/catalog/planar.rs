//! Solutions polynomial in `x` built on the reduction along `X(f) + Z(g)`.

use crate::error::Result;
use crate::model::ModelParams;
use crate::transforms::TimeFn;

use super::params::Resolved;
use super::solution::{guard, Solution};

/// Decoupled case of the reduction: profiles of `p̃ = f(t) y − ∫g` plus
/// `e^{±√(2F) y}` modes in the baroclinic part.
///
/// The baroclinic profile must solve `f² v'' − 2F v = Φ(p̃)`; for a varying
/// `f` a bare `ζ(p̃)` does not, so the harmonic profile carries the factor
/// `1/(f² + 2F)`.
pub(crate) fn a13_decoupled(p: &Resolved, m: &ModelParams) -> Result<Solution> {
    let f_exact = p.func("f")?;
    let g_exact = p.func("g")?;
    let f = TimeFn::from(&f_exact);
    let f1 = f.derivative();
    let g = TimeFn::from(&g_exact);
    let g_int = TimeFn::from(&g_exact.integral_from(&crate::algebra::rat_int(0)));
    let (amp1, amp2) = (p.real("amp1")?, p.real("amp2")?);
    let th1 = TimeFn::from(&p.func("theta1")?);
    let th2 = TimeFn::from(&p.func("theta2")?);
    let (beta, two_f) = (m.beta, 2.0 * m.froude);
    let root = two_f.sqrt();
    let scale = f.eval(0.0).abs().max(1.0);
    Ok(Solution::barotropic("a13_decoupled", move |t, x, y| {
        let fv = f.eval(t);
        guard(fv, scale, "f(t)")?;
        let pt = fv * y - g_int.eval(t);
        let v_plus = amp1 * pt.sin() / (fv * fv) - beta * y.powi(3) / 3.0;
        let plus = v_plus - 2.0 * (f1.eval(t) * y - g.eval(t)) / fv * x;
        let minus = amp2 * pt.cos() / (fv * fv + two_f) + th1.eval(t) * (root * y).exp() + th2.eval(t) * (-root * y).exp();
        Ok((plus, minus))
    }))
}
