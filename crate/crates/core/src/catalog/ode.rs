use std::ops::{Add, Mul};

/// Classical fourth-order Runge–Kutta; returns the state at every step.
pub fn rk4<T>(y0: Vec<T>, t0: f64, t1: f64, steps: usize, f: impl Fn(f64, &[T]) -> Vec<T>) -> Vec<Vec<T>>
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
{
    let h = (t1 - t0) / steps as f64;
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = y0;
    out.push(y.clone());
    let shift = |y: &[T], k: &[T], s: f64| -> Vec<T> { y.iter().zip(k).map(|(a, b)| *a + *b * s).collect() };
    for n in 0..steps {
        let t = t0 + n as f64 * h;
        let k1 = f(t, &y);
        let k2 = f(t + 0.5 * h, &shift(&y, &k1, 0.5 * h));
        let k3 = f(t + 0.5 * h, &shift(&y, &k2, 0.5 * h));
        let k4 = f(t + h, &shift(&y, &k3, h));
        y = (0..y.len())
            .map(|i| y[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0))
            .collect();
        out.push(y.clone());
    }
    out
}
