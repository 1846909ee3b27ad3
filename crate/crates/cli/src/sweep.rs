//! Random point transformations for the predicate/probe agreement sweep.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use qg_core::transforms::{PointTransform, TimeFn};

fn coefficient(rng: &mut ChaCha8Rng) -> f64 {
    let v: f64 = rng.gen_range(0.2..1.5);
    if rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

/// Zero, constant, linear, affine, quadratic or exponential.
pub fn random_fn(rng: &mut ChaCha8Rng) -> TimeFn {
    match rng.gen_range(0..6) {
        0 => TimeFn::zero(),
        1 => TimeFn::constant(coefficient(rng)),
        2 => TimeFn::linear(coefficient(rng)),
        3 => TimeFn::polynomial(&[coefficient(rng), coefficient(rng)]),
        4 => TimeFn::polynomial(&[0.0, coefficient(rng), coefficient(rng)]),
        _ => {
            let rate = rng.gen_range(1..4) as f64 / 2.0;
            let c = coefficient(rng);
            TimeFn::from_exppoly(&format!("exp({rate} t)").parse().expect("valid exponential")).scale(c)
        }
    }
}

/// Signs flip with probability 0.3; `Y0` lands on a wall or strictly inside.
pub fn random_transform(rng: &mut ChaCha8Rng, width: f64) -> PointTransform {
    let sign = |rng: &mut ChaCha8Rng| if rng.gen_bool(0.3) { -1 } else { 1 };
    let eps2 = sign(rng);
    let y0 = match rng.gen_range(0..3) {
        0 => 0.0,
        1 => width,
        _ => rng.gen_range(0.1..0.9) * width,
    };
    PointTransform {
        eps1: sign(rng),
        eps2,
        eps3: sign(rng),
        t0: rng.gen_range(-1.0..1.0),
        y0,
        psi0: rng.gen_range(-1.0..1.0),
        f: random_fn(rng),
        g: random_fn(rng),
    }
}
