//! FFT helpers for periodic directions.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANS: RefCell<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        let mut guard = cell.borrow_mut();
        let (planner, cache) = &mut *guard;
        cache
            .entry((n, inverse))
            .or_insert_with(|| {
                if inverse {
                    planner.plan_fft_inverse(n)
                } else {
                    planner.plan_fft_forward(n)
                }
            })
            .clone()
    })
}

/// Angular wavenumber of FFT bin `k` for a period `l` sampled with `n` points.
pub fn wavenumber(k: usize, n: usize, l: f64) -> f64 {
    let s = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
    2.0 * PI * s / l
}

/// Whether bin `k` is the (unpaired) Nyquist bin.
pub fn is_nyquist(k: usize, n: usize) -> bool {
    n % 2 == 0 && k == n / 2
}

/// In-place FFT of each row (length `nx`) of a row-major `nx × rows` buffer.
pub fn fft_rows(buf: &mut [Complex64], nx: usize, inverse: bool) {
    let p = plan(nx, inverse);
    p.process(buf);
    if inverse {
        let s = 1.0 / nx as f64;
        buf.iter_mut().for_each(|z| *z *= s);
    }
}

/// In-place FFT of each column (length `ny`) of a row-major `nx × ny` buffer.
pub fn fft_cols(buf: &mut [Complex64], nx: usize, ny: usize, inverse: bool) {
    let p = plan(ny, inverse);
    let mut col = vec![Complex64::new(0.0, 0.0); ny];
    for i in 0..nx {
        for j in 0..ny {
            col[j] = buf[j * nx + i];
        }
        p.process(&mut col);
        let s = if inverse { 1.0 / ny as f64 } else { 1.0 };
        for j in 0..ny {
            buf[j * nx + i] = col[j] * s;
        }
    }
}

pub fn forward_2d(values: &[f64], nx: usize, ny: usize) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_rows(&mut buf, nx, false);
    fft_cols(&mut buf, nx, ny, false);
    buf
}

pub fn inverse_2d(mut buf: Vec<Complex64>, nx: usize, ny: usize) -> Vec<f64> {
    fft_cols(&mut buf, nx, ny, true);
    fft_rows(&mut buf, nx, true);
    buf.into_iter().map(|z| z.re).collect()
}
