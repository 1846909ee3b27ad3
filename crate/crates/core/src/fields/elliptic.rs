//! Solves `(∇² − μ) ψ = rhs`.
//!
//! Periodic grids divide by the Fourier symbol of the chosen scheme, so the
//! inverse is exact (to round-off) against [`laplacian_with`]. Channel grids
//! transform in x and solve a tridiagonal system in y per wavenumber, with
//! Dirichlet wall values taken from a caller-supplied boundary field.
//!
//! [`laplacian_with`]: super::ops::laplacian_with

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::field::Field2D;
use super::grid::{GridSpec, Topology};
use super::ops::{self, Scheme};
use super::spectral;

/// Relative mean tolerance for the μ = 0 solvability check.
pub const MEAN_TOLERANCE: f64 = 1e-10;

fn fd_symbol(k: f64, h: f64) -> f64 {
    let s = (0.5 * k * h).sin();
    -4.0 * s * s / (h * h)
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(Error::branch("mu >= 0", format!("mu = {mu}")));
    }
    Ok(())
}

pub fn invert_helmholtz(rhs: &Field2D, mu: f64) -> Result<Field2D> {
    invert_helmholtz_with(rhs, mu, Scheme::FiniteDifference)
}

pub fn invert_helmholtz_with(rhs: &Field2D, mu: f64, scheme: Scheme) -> Result<Field2D> {
    match rhs.grid().topology {
        Topology::Channel => {
            let zero = Field2D::zeros(*rhs.grid());
            invert_helmholtz_with_boundary(rhs, mu, &zero)
        }
        _ => invert_periodic(rhs, mu, scheme),
    }
}

fn invert_periodic(rhs: &Field2D, mu: f64, scheme: Scheme) -> Result<Field2D> {
    let g = *rhs.grid();
    if g.topology != Topology::DoublyPeriodic {
        return Err(Error::InvalidGrid(format!("no inversion on {} grids", g.topology)));
    }
    check_mu(mu)?;
    scheme.check(&g)?;
    rhs.check_finite("helmholtz rhs")?;
    if mu == 0.0 {
        let mean = rhs.mean();
        let scale = rhs.max_abs().max(f64::MIN_POSITIVE);
        if mean.abs() > MEAN_TOLERANCE * scale {
            return Err(Error::Solvability(format!(
                "Poisson problem on a doubly periodic grid needs a zero-mean right-hand side, mean = {mean:e}"
            )));
        }
    }
    let (hx, hy) = (g.hx(), g.hy());
    Ok(ops::spectral_multiply(rhs, |kx, ky, i, j| {
        if mu == 0.0 && i == 0 && j == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let symbol = match scheme {
            Scheme::FiniteDifference => fd_symbol(kx, hx) + fd_symbol(ky, hy),
            Scheme::Spectral { .. } => -(kx * kx + ky * ky),
        } - mu;
        Complex64::new(1.0 / symbol, 0.0)
    }))
}

/// Channel inversion with Dirichlet wall data read from the wall rows of
/// `boundary`. Interior values of `boundary` are ignored.
pub fn invert_helmholtz_with_boundary(
    rhs: &Field2D,
    mu: f64,
    boundary: &Field2D,
) -> Result<Field2D> {
    let g = *rhs.grid();
    if g.topology != Topology::Channel {
        return invert_periodic(rhs, mu, Scheme::FiniteDifference);
    }
    g.same_as(boundary.grid())?;
    check_mu(mu)?;
    rhs.check_finite("helmholtz rhs")?;
    boundary.check_finite("helmholtz boundary")?;
    let (nx, my) = (g.mx(), g.my());
    let mut r: Vec<Complex64> = rhs.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    for j in [0, g.ny] {
        for i in 0..nx {
            r[g.idx(i, j)] = Complex64::new(boundary.at(i, j), 0.0);
        }
    }
    spectral::fft_rows(&mut r, nx, false);
    let hy2 = g.hy() * g.hy();
    let mut col = vec![Complex64::new(0.0, 0.0); my];
    for i in 0..nx {
        let kx = spectral::wavenumber(i, nx, g.lx);
        let diag = fd_symbol(kx, g.hx()) - mu - 2.0 / hy2;
        for (j, c) in col.iter_mut().enumerate() {
            *c = r[j * nx + i];
        }
        solve_dirichlet_line(&mut col, diag, 1.0 / hy2);
        for (j, c) in col.iter().enumerate() {
            r[j * nx + i] = *c;
        }
    }
    spectral::fft_rows(&mut r, nx, true);
    Field2D::from_values(g, r.into_iter().map(|z| z.re).collect())
}

/// Solves `off·u[j−1] + diag·u[j] + off·u[j+1] = b[j]` for interior `j`
/// with `u[0] = b[0]`, `u[n−1] = b[n−1]`, in place (Thomas algorithm).
pub(crate) fn solve_dirichlet_line(b: &mut [Complex64], diag: f64, off: f64) {
    let n = b.len();
    let m = n - 2;
    if m == 0 {
        return;
    }
    let mut rhs: Vec<Complex64> = (1..n - 1).map(|j| b[j]).collect();
    rhs[0] -= off * b[0];
    rhs[m - 1] -= off * b[n - 1];
    let mut c = vec![0.0; m];
    let mut d = vec![Complex64::new(0.0, 0.0); m];
    c[0] = off / diag;
    d[0] = rhs[0] / diag;
    for k in 1..m {
        let den = diag - off * c[k - 1];
        c[k] = off / den;
        d[k] = (rhs[k] - off * d[k - 1]) / den;
    }
    b[m] = d[m - 1];
    for k in (0..m - 1).rev() {
        b[k + 1] = d[k] - c[k] * b[k + 2];
    }
}

/// Residual `‖(∇² − μ)ψ − rhs‖∞ / ‖rhs‖∞` over nodes where the equation is imposed.
pub fn relative_residual(psi: &Field2D, rhs: &Field2D, mu: f64, scheme: Scheme) -> Result<f64> {
    let g: GridSpec = *psi.grid();
    let r = ops::laplacian_with(psi, scheme)?.axpy(-mu, psi)?.sub(rhs)?;
    let halo = usize::from(g.topology == Topology::Channel);
    Ok(r.max_abs_interior(halo) / rhs.max_abs_interior(halo).max(f64::MIN_POSITIVE))
}
