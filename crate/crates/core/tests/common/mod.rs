//! Profiles and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

use floquet_core::floquet;
use floquet_core::ode::{self, Tolerances};
use floquet_core::{FieldProfile, Mode, Segment};
use nalgebra::{Matrix2, Matrix4};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Unit pulse of length π/2 followed by free flight of length 3.
pub fn profile_p() -> FieldProfile {
    FieldProfile::from_segments(
        1.0,
        2.0,
        vec![Segment::new(1.0, FRAC_PI_2), Segment::new(0.0, 3.0)],
        Mode::Magnetic,
    )
    .unwrap()
}

/// Three quarter-turns followed by free flight of length 3; `D = 3`.
pub fn profile_positive() -> FieldProfile {
    FieldProfile::from_segments(
        1.0,
        2.0,
        vec![Segment::new(1.0, 1.5 * std::f64::consts::PI), Segment::new(0.0, 3.0)],
        Mode::Magnetic,
    )
    .unwrap()
}

pub fn random_profile(rng: &mut ChaCha8Rng) -> FieldProfile {
    let count = rng.gen_range(1..=4);
    let mass = rng.gen_range(0.5..2.0);
    let charge = if rng.gen_bool(0.5) { 1.0 } else { -1.0 } * rng.gen_range(0.5..2.0);
    let segments = (0..count)
        .map(|_| Segment::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.2..2.0)))
        .collect();
    let mode = if rng.gen_bool(0.8) { Mode::Magnetic } else { Mode::Oscillator };
    FieldProfile::from_segments(mass, charge, segments, mode).unwrap()
}

/// Random profile with `2.2 < |D| < 12` and `ζ₂(T)` well away from zero.
pub fn random_hyperbolic(rng: &mut ChaCha8Rng) -> FieldProfile {
    loop {
        let p = random_profile(rng);
        let mono = floquet::monodromy(&p).unwrap();
        let d = mono.discriminant.abs();
        if d > 2.2 && d < 12.0 && mono.pair_t.zeta2.abs() > 1e-3 {
            return p;
        }
    }
}

/// `‖a − b‖∞ / max(1, ‖b‖∞)`.
pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}

pub fn mat2(m: &Matrix2<f64>) -> [f64; 4] {
    [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]
}

/// Constant-`ν` intervals `(start, end, ν)` covering `[0, t]`.
pub fn pieces(profile: &FieldProfile, t: f64) -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    let mut start = 0.0;
    let mut period = 0;
    'outer: loop {
        for (seg, &nu) in profile.segments().iter().zip(profile.segment_nus()) {
            let _ = period;
            if start >= t {
                break 'outer;
            }
            let end = (start + seg.duration).min(t);
            out.push((start, end, nu));
            start += seg.duration;
        }
        period += 1;
    }
    out
}

/// Fundamental matrix `[[ζ₁, ζ₂], [ζ₁', ζ₂']]` at `t` by walking every
/// constant piece with plain trigonometry.
pub fn chained_fundamental(profile: &FieldProfile, t: f64) -> Matrix2<f64> {
    pieces(profile, t).into_iter().fold(Matrix2::identity(), |acc, (a, b, nu)| {
        let d = b - a;
        let step = if nu == 0.0 {
            Matrix2::new(1.0, d, 0.0, 1.0)
        } else {
            let (s, c) = (nu * d).sin_cos();
            Matrix2::new(c, s / nu, -nu * s, c)
        };
        step * acc
    })
}

/// Phase-space flow on `(x₁, x₂, p₁, p₂)` from Hamilton's equations of
/// `p²/2m + mν²x²/2 − νL` (without the `L` term in oscillator mode).
pub fn classical_flow(profile: &FieldProfile, t: f64, tol: Tolerances) -> Matrix4<f64> {
    let m = profile.mass();
    let rotate = profile.mode() == Mode::Magnetic;
    let mut y = [0.0; 16];
    for i in 0..4 {
        y[4 * i + i] = 1.0;
    }
    for (a, b, nu) in pieces(profile, t) {
        let w = if rotate { nu } else { 0.0 };
        let k = Matrix4::new(
            0.0, w, 1.0 / m, 0.0,
            -w, 0.0, 0.0, 1.0 / m,
            -m * nu * nu, 0.0, 0.0, w,
            0.0, -m * nu * nu, -w, 0.0,
        );
        let rhs = |_: f64, s: &[f64; 16]| {
            let phi = Matrix4::from_row_slice(s);
            let d = k * phi;
            let mut out = [0.0; 16];
            for r in 0..4 {
                for c in 0..4 {
                    out[4 * r + c] = d[(r, c)];
                }
            }
            out
        };
        y = ode::integrate(rhs, a, y, b, tol).unwrap().0;
    }
    Matrix4::from_row_slice(&y)
}
