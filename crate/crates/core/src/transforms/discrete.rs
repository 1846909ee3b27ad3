use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::ExactSolution;

use super::point::PointTransform;

/// Involutions outside the identity component of the group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Discrete {
    /// `(t, x, y, ψ¹, ψ²) ↦ (−t, −x, y, ψ¹, ψ²)`
    MirrorTx,
    /// `(t, x, y, ψ¹, ψ²) ↦ (t, x, −y, −ψ¹, −ψ²)`
    MirrorY,
    /// `(t, x, y, ψ¹, ψ²) ↦ (t, x, y, ψ², ψ¹)`
    LayerSwap,
}

impl Discrete {
    pub const ALL: [Discrete; 3] = [Discrete::MirrorTx, Discrete::MirrorY, Discrete::LayerSwap];

    pub fn as_str(self) -> &'static str {
        match self {
            Discrete::MirrorTx => "mirror_tx",
            Discrete::MirrorY => "mirror_y",
            Discrete::LayerSwap => "layer_swap",
        }
    }

    /// Image point and layered values.
    pub fn map_layered(self, t: f64, x: f64, y: f64, p1: f64, p2: f64) -> (f64, f64, f64, f64, f64) {
        match self {
            Discrete::MirrorTx => (-t, -x, y, p1, p2),
            Discrete::MirrorY => (t, x, -y, -p1, -p2),
            Discrete::LayerSwap => (t, x, y, p2, p1),
        }
    }

    /// Same map written for `(ψ⁺, ψ⁻)`.
    pub fn map_barotropic(self, t: f64, x: f64, y: f64, plus: f64, minus: f64) -> (f64, f64, f64, f64, f64) {
        match self {
            Discrete::MirrorTx => (-t, -x, y, plus, minus),
            Discrete::MirrorY => (t, x, -y, -plus, -minus),
            Discrete::LayerSwap => (t, x, y, plus, -minus),
        }
    }

    /// The group element with the same action.
    pub fn as_point_transform(self) -> PointTransform {
        let id = PointTransform::identity();
        match self {
            Discrete::MirrorTx => PointTransform { eps1: -1, ..id },
            Discrete::MirrorY => PointTransform { eps2: -1, eps3: -1, ..id },
            Discrete::LayerSwap => PointTransform { eps3: -1, ..id },
        }
    }
}

impl fmt::Display for Discrete {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Discrete {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Discrete::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

pub struct Mirrored<S> {
    pub sym: Discrete,
    pub inner: S,
}

impl<S: ExactSolution> ExactSolution for Mirrored<S> {
    fn name(&self) -> String {
        format!("{}({})", self.sym, self.inner.name())
    }

    fn eval(&self, t: f64, x: f64, y: f64) -> Result<(f64, f64)> {
        // each map is an involution, so the preimage is the image
        let (t0, x0, y0, _, _) = self.sym.map_layered(t, x, y, 0.0, 0.0);
        let (p1, p2) = self.inner.eval(t0, x0, y0)?;
        let (_, _, _, q1, q2) = self.sym.map_layered(t0, x0, y0, p1, p2);
        Ok((q1, q2))
    }
}

pub fn apply_discrete<S: ExactSolution>(sym: Discrete, s: S) -> Mirrored<S> {
    Mirrored { sym, inner: s }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::point::apply_to_solution;

    struct Probe;

    impl ExactSolution for Probe {
        fn name(&self) -> String {
            "probe".into()
        }
        fn eval(&self, t: f64, x: f64, y: f64) -> Result<(f64, f64)> {
            Ok(((x + 2.0 * y + 0.5 * t).sin() + y * y * y, (x - t).cos() * y + t))
        }
    }

    const PTS: [(f64, f64, f64); 3] = [(0.1, 0.2, 0.3), (-0.7, 1.1, -0.4), (1.3, -2.0, 0.9)];

    #[test]
    fn matches_group_element() {
        for d in Discrete::ALL {
            let a = apply_discrete(d, Probe);
            let b = apply_to_solution(&d.as_point_transform(), Probe).unwrap();
            for (t, x, y) in PTS {
                let (u, v) = (a.eval(t, x, y).unwrap(), b.eval(t, x, y).unwrap());
                assert!((u.0 - v.0).abs() < 1e-14 && (u.1 - v.1).abs() < 1e-14, "{d}");
            }
        }
    }

    #[test]
    fn involutions() {
        for d in Discrete::ALL {
            let twice = apply_discrete(d, apply_discrete(d, Probe));
            for (t, x, y) in PTS {
                assert_eq!(twice.eval(t, x, y).unwrap(), Probe.eval(t, x, y).unwrap());
            }
            let p = d.as_point_transform();
            assert!(p.then(&p).is_identity());
        }
    }

    #[test]
    fn dictionaries_agree() {
        for d in Discrete::ALL {
            let (p1, p2) = (0.3, -1.7);
            let (_, _, _, q1, q2) = d.map_layered(0.5, 0.6, 0.7, p1, p2);
            let (_, _, _, a, b) = d.map_barotropic(0.5, 0.6, 0.7, p1 + p2, p1 - p2);
            assert_eq!((q1 + q2, q1 - q2), (a, b));
        }
    }

    #[test]
    fn names_round_trip() {
        for d in Discrete::ALL {
            assert_eq!(d.as_str().parse::<Discrete>().unwrap(), d);
        }
        assert!("mirror_z".parse::<Discrete>().is_err());
    }
}
