//! Library results against oracles built without the library's closed forms.

mod common;

use common::*;
use floquet_core::dynamics::{self, GaussianState};
use floquet_core::floquet;
use floquet_core::hill::{self, Method};
use floquet_core::ode::Tolerances;
use floquet_core::pulses::{self, ThreePulse};
use nalgebra::{Matrix4, Vector4};
use rand::Rng;

const TIGHT: Tolerances = Tolerances { rtol: 1e-12, atol: 1e-14 };

fn flat(m: &Matrix4<f64>) -> Vec<f64> {
    m.iter().copied().collect()
}

fn random_state(rng: &mut rand_chacha::ChaCha8Rng) -> GaussianState {
    let mean = Vector4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
    let l = Matrix4::from_fn(|i, j| if i >= j { rng.gen_range(-0.5..0.5) } else { 0.0 });
    let cov = l * l.transpose() + Matrix4::identity() * 0.5;
    GaussianState::new(mean, cov).unwrap()
}

#[test]
fn closed_form_matches_piecewise_trigonometry() {
    let mut r = rng(11);
    for _ in 0..50 {
        let p = random_profile(&mut r);
        let t = r.gen_range(0.0..4.0 * p.period());
        let got = hill::fundamental_closed_form(&p, t).matrix();
        let want = chained_fundamental(&p, t);
        assert!(rel_err(&mat2(&got), &mat2(&want)) < 1e-12, "t = {t}");
    }
}

#[test]
fn heisenberg_map_matches_hamilton_flow() {
    let mut r = rng(12);
    for _ in 0..10 {
        let p = random_profile(&mut r);
        let t = r.gen_range(0.0..5.0 * p.period());
        let got = dynamics::heisenberg_map(&p, t).unwrap().phase_space_matrix();
        let want = classical_flow(&p, t, TIGHT);
        assert!(rel_err(&flat(&got), &flat(&want)) < 1e-7, "t = {t}: {got} vs {want}");
    }
}

#[test]
fn gaussian_moments_match_hamilton_flow() {
    let mut r = rng(13);
    for _ in 0..10 {
        let p = random_profile(&mut r);
        let t = r.gen_range(0.0..5.0 * p.period());
        let state = random_state(&mut r);
        let map = dynamics::heisenberg_map(&p, t).unwrap();
        let got = dynamics::evolve_gaussian(&state, &map);
        let s = classical_flow(&p, t, TIGHT);
        let mean = s * state.mean;
        let cov = s * state.cov * s.transpose();
        let mean_err = rel_err(got.mean.as_slice(), mean.as_slice());
        let cov_err = rel_err(&flat(&got.cov), &flat(&cov));
        assert!(mean_err < 1e-6 && cov_err < 1e-6, "t = {t}: {mean_err:e} {cov_err:e}");
    }
}

#[test]
fn scaled_map_agrees_with_plain_map() {
    let mut r = rng(14);
    for _ in 0..20 {
        let p = random_profile(&mut r);
        let t = r.gen_range(0.0..6.0 * p.period());
        let plain = dynamics::heisenberg_map(&p, t).unwrap();
        let scaled = dynamics::heisenberg_map_scaled(&p, t).unwrap().unscaled();
        assert!(plain.max_abs_diff(&scaled) <= 1e-9 * plain.radial_norm().max(1.0));
    }
}

#[test]
fn cross_period_matches_numeric_integration() {
    let mut r = rng(15);
    for p in [profile_p(), profile_positive(), random_hyperbolic(&mut r)] {
        let nf = floquet::normal_form(&p).unwrap();
        for _ in 0..20 {
            let t = r.gen_range(0.0..8.0 * p.period());
            let got = floquet::cross_period(&p, &nf, t).unwrap();
            let want = hill::fundamental_numeric(&p, t, TIGHT).unwrap();
            assert!(rel_err(&got.as_array(), &want.as_array()) < 1e-7, "t = {t}");
        }
    }
}

#[test]
fn power_matrix_matches_repeated_multiplication() {
    let mut r = rng(16);
    for p in [profile_p(), profile_positive(), random_hyperbolic(&mut r), random_hyperbolic(&mut r)] {
        let nf = floquet::normal_form(&p).unwrap();
        let (f, m) = (chained_fundamental(&p, p.period()), p.mass());
        let a = nalgebra::Matrix2::new(f[(0, 0)], f[(0, 1)] / m, m * f[(1, 0)], f[(1, 1)]);
        let mut acc = nalgebra::Matrix2::identity();
        for n in 1..=12u64 {
            acc = a * acc;
            let got = floquet::power_matrix(&nf, n) * nf.sign(n);
            assert!(rel_err(&mat2(&got), &mat2(&acc)) < 1e-8, "N = {n}: {got} vs {acc}");
        }
    }
}

#[test]
fn three_pulse_trace_matches_transfer_walk() {
    let mut r = rng(17);
    for _ in 0..30 {
        let tp = ThreePulse {
            mass: r.gen_range(0.5..2.0),
            charge: r.gen_range(0.5..2.0),
            omegas: [0; 3].map(|_| r.gen_range(0.3..3.0)),
            durations: [0; 3].map(|_| r.gen_range(0.2..2.0)),
        };
        let p = tp.profile().unwrap();
        let trace = chained_fundamental(&p, p.period()).trace();
        assert!((tp.discriminant() - trace).abs() < 1e-10);
    }
}

#[test]
fn single_pulse_trace_matches_transfer_walk() {
    let mut r = rng(18);
    for _ in 0..20 {
        let (m, q, b) = (r.gen_range(0.5..2.0), r.gen_range(0.5..2.0), r.gen_range(-2.0..2.0));
        let (tb, free) = (r.gen_range(0.2..2.0), r.gen_range(0.2..3.0));
        let p = floquet_core::FieldProfile::from_segments(
            m,
            q,
            vec![floquet_core::Segment::new(b, tb), floquet_core::Segment::new(0.0, free)],
            floquet_core::Mode::Magnetic,
        )
        .unwrap();
        let trace = chained_fundamental(&p, p.period()).trace();
        let d = pulses::single_pulse_discriminant(m, q, b, tb, tb + free);
        assert!((d - trace).abs() < 1e-10);
    }
}

#[test]
fn numeric_method_matches_trigonometry() {
    let mut r = rng(19);
    for _ in 0..10 {
        let p = random_profile(&mut r);
        let t = r.gen_range(0.0..3.0 * p.period());
        let got = hill::fundamental_at(&p, t, Method::Numeric).unwrap().matrix();
        assert!(rel_err(&mat2(&got), &mat2(&chained_fundamental(&p, t))) < 1e-8);
    }
}
