//! Differential operators on [`Field2D`].
//!
//! Finite differences are second-order central in the interior. Periodic
//! directions wrap; walled directions switch to one-sided second-order
//! stencils on the wall nodes. The spectral scheme is only available on
//! doubly periodic grids.

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::field::Field2D;
use super::grid::GridSpec;
use super::spectral;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    FiniteDifference,
    /// Transform-based derivatives; `dealias` applies two-thirds truncation
    /// to the factors and the result of nonlinear products.
    Spectral { dealias: bool },
}

impl Scheme {
    pub fn check(&self, grid: &GridSpec) -> Result<()> {
        match self {
            Scheme::Spectral { .. } if !grid.topology.y_periodic() => Err(Error::InvalidGrid(
                format!("spectral scheme needs a doubly periodic grid, got {}", grid.topology),
            )),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Axis {
    X,
    Y,
}

/// First (order 1) or second (order 2) derivative along one axis.
fn fd_axis(f: &Field2D, axis: Axis, order: u8) -> Field2D {
    let g = *f.grid();
    let (n, periodic, h) = match axis {
        Axis::X => (g.mx(), g.topology.x_periodic(), g.hx()),
        Axis::Y => (g.my(), g.topology.y_periodic(), g.hy()),
    };
    let lines = match axis {
        Axis::X => g.my(),
        Axis::Y => g.mx(),
    };
    let at = |line: usize, k: usize| match axis {
        Axis::X => g.idx(k, line),
        Axis::Y => g.idx(line, k),
    };
    let v = f.values();
    let mut out = vec![0.0; v.len()];
    for line in 0..lines {
        for k in 0..n {
            let val = if periodic {
                let km = (k + n - 1) % n;
                let kp = (k + 1) % n;
                let (a, b, c) = (v[at(line, km)], v[at(line, k)], v[at(line, kp)]);
                if order == 1 {
                    (c - a) / (2.0 * h)
                } else {
                    (a - 2.0 * b + c) / (h * h)
                }
            } else if k == 0 || k == n - 1 {
                // one-sided, pointing into the domain
                let (s, base): (f64, usize) = if k == 0 { (1.0, 0) } else { (-1.0, n - 1) };
                let step = |m: usize| {
                    if k == 0 {
                        v[at(line, base + m)]
                    } else {
                        v[at(line, base - m)]
                    }
                };
                if order == 1 {
                    s * (-3.0 * step(0) + 4.0 * step(1) - step(2)) / (2.0 * h)
                } else {
                    (2.0 * step(0) - 5.0 * step(1) + 4.0 * step(2) - step(3)) / (h * h)
                }
            } else {
                let (a, b, c) = (v[at(line, k - 1)], v[at(line, k)], v[at(line, k + 1)]);
                if order == 1 {
                    (c - a) / (2.0 * h)
                } else {
                    (a - 2.0 * b + c) / (h * h)
                }
            };
            out[at(line, k)] = val;
        }
    }
    Field2D::from_values(g, out).expect("same grid")
}

fn dealias_mask(g: &GridSpec) -> impl Fn(usize, usize) -> bool + '_ {
    let kxmax = g.nx / 3;
    let kymax = g.ny / 3;
    move |i: usize, j: usize| {
        let kx = if i <= g.nx / 2 { i } else { g.nx - i };
        let ky = if j <= g.ny / 2 { j } else { g.ny - j };
        kx <= kxmax && ky <= kymax
    }
}

fn spectral_filter(f: &Field2D) -> Field2D {
    let g = *f.grid();
    let mut hat = spectral::forward_2d(f.values(), g.nx, g.ny);
    let keep = dealias_mask(&g);
    for j in 0..g.ny {
        for i in 0..g.nx {
            if !keep(i, j) {
                hat[j * g.nx + i] = Complex64::new(0.0, 0.0);
            }
        }
    }
    Field2D::from_values(g, spectral::inverse_2d(hat, g.nx, g.ny)).expect("same grid")
}

/// Applies a Fourier multiplier `m(kx, ky, i, j)` to a periodic field.
pub(crate) fn spectral_multiply(
    f: &Field2D,
    m: impl Fn(f64, f64, usize, usize) -> Complex64,
) -> Field2D {
    let g = *f.grid();
    let mut hat = spectral::forward_2d(f.values(), g.nx, g.ny);
    for j in 0..g.ny {
        let ky = spectral::wavenumber(j, g.ny, g.ly);
        for i in 0..g.nx {
            let kx = spectral::wavenumber(i, g.nx, g.lx);
            hat[j * g.nx + i] *= m(kx, ky, i, j);
        }
    }
    Field2D::from_values(g, spectral::inverse_2d(hat, g.nx, g.ny)).expect("same grid")
}

fn spectral_d(f: &Field2D, axis: Axis) -> Field2D {
    let g = *f.grid();
    spectral_multiply(f, |kx, ky, i, j| {
        let (k, nyq) = match axis {
            Axis::X => (kx, spectral::is_nyquist(i, g.nx)),
            Axis::Y => (ky, spectral::is_nyquist(j, g.ny)),
        };
        if nyq {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, k)
        }
    })
}

pub fn dx_with(f: &Field2D, scheme: Scheme) -> Result<Field2D> {
    scheme.check(f.grid())?;
    f.check_finite("dx input")?;
    Ok(match scheme {
        Scheme::FiniteDifference => fd_axis(f, Axis::X, 1),
        Scheme::Spectral { .. } => spectral_d(f, Axis::X),
    })
}

pub fn dy_with(f: &Field2D, scheme: Scheme) -> Result<Field2D> {
    scheme.check(f.grid())?;
    f.check_finite("dy input")?;
    Ok(match scheme {
        Scheme::FiniteDifference => fd_axis(f, Axis::Y, 1),
        Scheme::Spectral { .. } => spectral_d(f, Axis::Y),
    })
}

pub fn dx(f: &Field2D) -> Result<Field2D> {
    dx_with(f, Scheme::FiniteDifference)
}

pub fn dy(f: &Field2D) -> Result<Field2D> {
    dy_with(f, Scheme::FiniteDifference)
}

pub fn laplacian_with(f: &Field2D, scheme: Scheme) -> Result<Field2D> {
    scheme.check(f.grid())?;
    f.check_finite("laplacian input")?;
    match scheme {
        Scheme::FiniteDifference => fd_axis(f, Axis::X, 2).add(&fd_axis(f, Axis::Y, 2)),
        Scheme::Spectral { .. } => {
            Ok(spectral_multiply(f, |kx, ky, _, _| Complex64::new(-(kx * kx + ky * ky), 0.0)))
        }
    }
}

/// Discrete ∇²f with second-order central differences.
pub fn laplacian(f: &Field2D) -> Result<Field2D> {
    laplacian_with(f, Scheme::FiniteDifference)
}

pub fn poisson_bracket_with(a: &Field2D, b: &Field2D, scheme: Scheme) -> Result<Field2D> {
    a.grid().same_as(b.grid())?;
    scheme.check(a.grid())?;
    a.check_finite("bracket lhs")?;
    b.check_finite("bracket rhs")?;
    let (ax, ay, bx, by) = match scheme {
        Scheme::FiniteDifference => (
            fd_axis(a, Axis::X, 1),
            fd_axis(a, Axis::Y, 1),
            fd_axis(b, Axis::X, 1),
            fd_axis(b, Axis::Y, 1),
        ),
        Scheme::Spectral { dealias } => {
            let (a, b) = if dealias {
                (spectral_filter(a), spectral_filter(b))
            } else {
                (a.clone(), b.clone())
            };
            (
                spectral_d(&a, Axis::X),
                spectral_d(&a, Axis::Y),
                spectral_d(&b, Axis::X),
                spectral_d(&b, Axis::Y),
            )
        }
    };
    let values: Vec<f64> = (0..ax.values().len())
        .map(|k| ax.values()[k] * by.values()[k] - ay.values()[k] * bx.values()[k])
        .collect();
    let out = Field2D::from_values(*a.grid(), values)?;
    Ok(match scheme {
        Scheme::Spectral { dealias: true } => spectral_filter(&out),
        _ => out,
    })
}

/// `{a, b} = a_x b_y − a_y b_x`.
pub fn poisson_bracket(a: &Field2D, b: &Field2D) -> Result<Field2D> {
    poisson_bracket_with(a, b, Scheme::FiniteDifference)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::grid::Topology;
    use std::f64::consts::PI;

    fn periodic(n: usize) -> GridSpec {
        GridSpec::periodic(n, n, 2.0 * PI, 2.0 * PI).unwrap()
    }

    fn max_err(f: &Field2D, exact: impl Fn(f64, f64) -> f64) -> f64 {
        let e = Field2D::from_fn(*f.grid(), exact);
        f.sub(&e).unwrap().max_abs()
    }

    #[test]
    fn laplacian_of_sin_x() {
        for n in [16, 32, 64] {
            let g = periodic(n);
            let f = Field2D::from_fn(g, |x, _| x.sin());
            let err = max_err(&laplacian(&f).unwrap(), |x, _| -x.sin());
            let h = g.hx();
            // Taylor remainder of the 3-point stencil is h²/12 · max|f''''|.
            assert!(err <= h * h / 12.0 + 1e-12, "n={n} err={err}");
        }
    }

    #[test]
    fn laplacian_annihilates_constants() {
        for topo in [Topology::DoublyPeriodic, Topology::Channel, Topology::Rectangle] {
            let g = GridSpec::new(12, 10, 3.0, 2.0, topo).unwrap();
            let l = laplacian(&Field2D::constant(g, 7.0)).unwrap();
            assert!(l.max_abs() < 1e-10, "{topo}");
        }
    }

    #[test]
    fn laplacian_of_product_of_sines() {
        let mut prev = f64::INFINITY;
        for n in [16, 32, 64] {
            let g = periodic(n);
            let f = Field2D::from_fn(g, |x, y| x.sin() * y.sin());
            let err = max_err(&laplacian(&f).unwrap(), |x, y| -2.0 * x.sin() * y.sin());
            assert!(prev / err >= 3.5, "n={n}: {prev} -> {err}");
            prev = err;
        }
    }

    #[test]
    fn channel_wall_stencils_are_second_order() {
        let mut prev = f64::INFINITY;
        for n in [16, 32, 64] {
            let g = GridSpec::channel(n, n, 2.0 * PI, 1.0).unwrap();
            let f = Field2D::from_fn(g, |x, y| x.cos() * (2.0 * y).exp());
            let err = max_err(&laplacian(&f).unwrap(), |x, y| 3.0 * x.cos() * (2.0 * y).exp());
            assert!(prev / err >= 3.5, "n={n}: {prev} -> {err}");
            prev = err;
        }
    }

    #[test]
    fn spectral_laplacian_is_exact_for_resolved_modes() {
        let g = periodic(16);
        let f = Field2D::from_fn(g, |x, y| (3.0 * x + 2.0 * y).cos());
        let l = laplacian_with(&f, Scheme::Spectral { dealias: false }).unwrap();
        assert!(max_err(&l, |x, y| -13.0 * (3.0 * x + 2.0 * y).cos()) < 1e-11);
    }

    #[test]
    fn bracket_of_coordinates_is_one() {
        let g = GridSpec::channel(16, 16, 1.0, 1.0).unwrap();
        let b = poisson_bracket(&Field2D::coord_x(g), &Field2D::coord_y(g)).unwrap();
        // x is not periodic, so only nodes away from the x seam are meaningful
        for j in 0..g.my() {
            for i in 1..g.mx() - 1 {
                assert!((b.at(i, j) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bracket_of_field_with_itself_vanishes() {
        let g = periodic(16);
        let a = Field2D::from_fn(g, |x, y| (x + 0.3).sin() * (2.0 * y).cos() + y.sin());
        for s in [Scheme::FiniteDifference, Scheme::Spectral { dealias: true }] {
            assert_eq!(poisson_bracket_with(&a, &a, s).unwrap().max_abs(), 0.0);
        }
    }

    #[test]
    fn bracket_sin_cos_converges() {
        let mut prev = f64::INFINITY;
        for n in [16, 32, 64] {
            let g = periodic(n);
            let a = Field2D::from_fn(g, |x, _| x.sin());
            let b = Field2D::from_fn(g, |_, y| y.cos());
            let err = max_err(&poisson_bracket(&a, &b).unwrap(), |x, y| -x.cos() * y.sin());
            assert!(prev / err >= 3.5);
            prev = err;
        }
    }

    #[test]
    fn spectral_rejected_on_channel() {
        let g = GridSpec::channel(16, 16, 1.0, 1.0).unwrap();
        let f = Field2D::zeros(g);
        assert!(laplacian_with(&f, Scheme::Spectral { dealias: false }).is_err());
    }

    #[test]
    fn non_finite_input_rejected() {
        let g = periodic(8);
        let mut f = Field2D::zeros(g);
        f.set(0, 0, f64::NAN);
        assert!(matches!(laplacian(&f), Err(Error::NonFinite { .. })));
    }
}
