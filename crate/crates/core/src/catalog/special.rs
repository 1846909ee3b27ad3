//! Exponential integrals on the real line.

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `∫_x^∞ e^{−s}/s ds`, with the principal value for `x < 0`.
///
/// Satisfies `d/dx E₁(x) = −e^{−x}/x` on both half-lines.
pub fn e1(x: f64) -> f64 {
    if x > 0.0 {
        e1_pos(x)
    } else if x < 0.0 {
        -ei_pos(-x)
    } else {
        f64::INFINITY
    }
}

/// Principal value of `∫_{−∞}^x e^{s}/s ds`.
pub fn ei(x: f64) -> f64 {
    if x > 0.0 {
        ei_pos(x)
    } else if x < 0.0 {
        -e1_pos(-x)
    } else {
        f64::NEG_INFINITY
    }
}

/// `E₁(w)·e^{w}` without overflow for large `|w|`.
pub fn e1_scaled(w: f64) -> f64 {
    if w > 1.0 {
        e1_cf(w)
    } else if w >= -40.0 {
        e1(w) * w.exp()
    } else {
        // −Ei(|w|)·e^{−|w|} from the asymptotic series
        let x = -w;
        -asymptotic_sum(x) / x
    }
}

fn asymptotic_sum(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let next = term * k as f64 / x;
        if next > term {
            break;
        }
        term = next;
        sum += term;
        if term < 1e-17 {
            break;
        }
    }
    sum
}

/// Continued fraction for `E₁(x)·e^{x}`, `x > 1`.
fn e1_cf(x: f64) -> f64 {
    // modified Lentz
    let tiny = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * i as f64;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

fn e1_pos(x: f64) -> f64 {
    if x <= 1.0 {
        // −γ − ln x − Σ (−x)^k / (k·k!)
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..60 {
            term *= -x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        -EULER_GAMMA - x.ln() - sum
    } else {
        e1_cf(x) * (-x).exp()
    }
}

fn ei_pos(x: f64) -> f64 {
    if x <= 40.0 {
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..200 {
            term *= x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add < 1e-17 * sum {
                break;
            }
        }
        EULER_GAMMA + x.ln() + sum
    } else {
        x.exp() / x * asymptotic_sum(x)
    }
}
