//! Acceptance suite: one line per criterion, nonzero exit on any failure.

mod common;

use std::f64::consts::{PI, SQRT_2};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use floquet_core::dynamics::{self, GaussianState, GrowthClass};
use floquet_core::floquet::{self, NormalForm};
use floquet_core::hill::{self, Method};
use floquet_core::mourre;
use floquet_core::ode::Tolerances;
use floquet_core::pulses::{self, ThreePulse};
use floquet_core::symplectic::{self, compose, exp_quadratic, primitive_map, Factorization, Primitive};
use floquet_core::{FieldProfile, Mode, Result, Segment};
use nalgebra::Matrix2;
use rand::Rng;

const TIGHT: Tolerances = Tolerances { rtol: 1e-12, atol: 1e-14 };

type Criterion = fn() -> Result<Outcome>;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn within_time(out: Outcome, elapsed: Duration, limit: Duration) -> Outcome {
    let ok = elapsed < limit;
    Outcome::new(
        out.pass && ok,
        format!("{}; {:.3} s (limit {} s)", out.detail, elapsed.as_secs_f64(), limit.as_secs_f64()),
    )
}

/// The 2×2 monodromy block `[[ζ₁, ζ₂/m], [mζ₁', ζ₂']]` from the trigonometric walk.
fn monodromy_block(p: &FieldProfile) -> Matrix2<f64> {
    let f = chained_fundamental(p, p.period());
    let m = p.mass();
    Matrix2::new(f[(0, 0)], f[(0, 1)] / m, m * f[(1, 0)], f[(1, 1)])
}

/// Five hyperbolic profiles with nonvanishing `ζ₂(T)`, profile P first.
fn hyperbolic_set() -> Vec<FieldProfile> {
    let mut r = rng(404);
    let quarter = ThreePulse::quarter_phase(1.0, 2.0, [1.0, 4.0, 1.0], [0, 0, 0]).unwrap();
    vec![
        profile_p(),
        profile_positive(),
        quarter.profile().unwrap(),
        random_hyperbolic(&mut r),
        random_hyperbolic(&mut r),
    ]
}

fn wronskian() -> Result<Outcome> {
    let start = Instant::now();
    let mut r = rng(1);
    let (mut closed, mut numeric) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let p = random_profile(&mut r);
        let t = r.gen_range(0.0..3.0 * p.period());
        closed = closed.max((hill::fundamental_closed_form(&p, t).wronskian() - 1.0).abs());
        numeric = numeric.max((hill::fundamental_numeric(&p, t, Tolerances::default())?.wronskian() - 1.0).abs());
    }
    let out = Outcome::new(
        closed <= 1e-9 && numeric <= 1e-8,
        format!("max |W − 1| closed form {closed:.2e}, numeric {numeric:.2e}"),
    );
    Ok(within_time(out, start.elapsed(), Duration::from_secs(1)))
}

fn oracle_equivalence() -> Result<Outcome> {
    let start = Instant::now();
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = random_profile(&mut r);
        for _ in 0..20 {
            let t = r.gen_range(0.0..3.0 * p.period());
            let a = hill::fundamental_at(&p, t, Method::ClosedForm)?;
            let b = hill::fundamental_at(&p, t, Method::Numeric)?;
            worst = worst.max(rel_err(&a.as_array(), &b.as_array()));
        }
    }
    let out = Outcome::new(worst <= 1e-8, format!("max relative difference {worst:.2e} over 400 points"));
    Ok(within_time(out, start.elapsed(), Duration::from_secs(5)))
}

fn factorization() -> Result<Outcome> {
    let mut r = rng(3);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let p = random_profile(&mut r);
        let mut used = 0;
        while used < 10 {
            let t = r.gen_range(0.0..3.0 * p.period());
            let f = chained_fundamental(&p, t);
            if f[(0, 1)].abs() <= 1e-6 {
                continue;
            }
            let pair = hill::fundamental_closed_form(&p, t);
            let fac = Factorization::from_pair(&pair, p.mass())?;
            let omega = p.omega_phase(t);
            let lhs = symplectic::factorization_map(fac.a, fac.b, fac.c, omega);
            let rhs = symplectic::transfer_to_map(&hill::FundamentalPair::from_matrix(t, &f), p.mass(), omega);
            worst = worst.max(lhs.max_abs_diff(&rhs) / rhs.radial_norm().max(1.0));
            used += 1;
        }
    }
    Ok(Outcome::new(worst <= 1e-9, format!("max relative difference {worst:.2e} at 100 times on 10 profiles")))
}

fn profile_p_constants(nf: &NormalForm) -> (f64, String) {
    let b3 = (3.0 + 5f64.sqrt()) / 2.0;
    let t = nf.period;
    let b_d = -b3.ln() / 5f64.sqrt();
    let omega_t = PI / 2.0;
    let checks = [
        ("D", nf.discriminant, -3.0),
        ("A_D", nf.a_d, -0.75),
        ("C_D", nf.c_d, 5f64.sqrt() / 2.0),
        ("T𝒟", t * nf.cal_d, -b3.ln()),
        ("B_D", nf.b_d, b_d),
        ("D_D", nf.d_d, -(omega_t + PI) / b_d),
    ];
    let worst = checks.iter().map(|(_, got, want)| (got - want).abs()).fold(0.0, f64::max);
    let listing: Vec<String> = checks.iter().map(|(n, g, _)| format!("{n} = {g:.9}")).collect();
    (worst, listing.join(", "))
}

fn normal_form_conjugation() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let profiles = hyperbolic_set();
    for p in &profiles {
        let nf = floquet::normal_form(p)?;
        for n in 1..=8u32 {
            let t = n as f64 * p.period();
            let f = chained_fundamental(p, t);
            let want = symplectic::transfer_to_map(
                &hill::FundamentalPair::from_matrix(t, &f),
                p.mass(),
                n as f64 * p.omega_period(),
            );
            worst = worst.max(nf.conjugated_map(t).max_abs_diff(&want) / want.radial_norm());
        }
    }
    let (const_err, listing) = profile_p_constants(&floquet::normal_form(&profiles[0])?);
    Ok(Outcome::new(
        worst <= 1e-8 && const_err <= 1e-12,
        format!("max relative difference {worst:.2e} (N ≤ 8, 5 profiles); P: {listing}; constants off by {const_err:.1e}"),
    ))
}

fn power_matrix() -> Result<Outcome> {
    let (mut det_err, mut pow_err) = (0.0f64, 0.0f64);
    for p in &hyperbolic_set() {
        let nf = floquet::normal_form(p)?;
        let a = monodromy_block(p);
        let mut acc = Matrix2::identity();
        for n in 1..=12u64 {
            acc = a * acc;
            let m = floquet::power_matrix(&nf, n);
            det_err = det_err.max((m.determinant() - 1.0).abs() / m.amax().powi(2).max(1.0));
            pow_err = pow_err.max(rel_err(&mat2(&(m * nf.sign(n))), &mat2(&acc)));
        }
    }
    Ok(Outcome::new(
        det_err <= 1e-8 && pow_err <= 1e-8,
        format!("relative |det − 1| {det_err:.2e}, relative |𝒜ᴺ − sM_N| {pow_err:.2e} (N ≤ 12, 5 profiles)"),
    ))
}

fn cross_period() -> Result<Outcome> {
    let p = profile_p();
    let nf = floquet::normal_form(&p)?;
    let mut r = rng(6);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let t = r.gen_range(0.0..8.0 * p.period());
        let got = floquet::cross_period(&p, &nf, t)?;
        let want = hill::fundamental_numeric(&p, t, TIGHT)?;
        worst = worst.max(rel_err(&got.as_array(), &want.as_array()));
    }
    Ok(Outcome::new(worst <= 1e-7, format!("max relative difference {worst:.2e} at 50 times in [0, 8T]")))
}

fn growth() -> Result<Outcome> {
    let start = Instant::now();
    let state = GaussianState::displaced_vacuum();
    let free = FieldProfile::from_segments(1.0, 2.0, vec![Segment::new(0.0, 1.0)], Mode::Magnetic)?;
    let elliptic = FieldProfile::from_segments(1.0, 2.0, vec![Segment::new(1.0, 1.0)], Mode::Magnetic)?;
    let p = profile_p();
    let g_free = dynamics::growth_rate(&free, 20, &state)?;
    let g_ell = dynamics::growth_rate(&elliptic, 20, &state)?;
    let g_p = dynamics::growth_rate(&p, 20, &state)?;
    let want = ((3.0 + 5f64.sqrt()) / 2.0).ln() / p.period();
    let rate_err = (g_p.rate - want).abs() / want;
    let out = Outcome::new(
        g_free.class == GrowthClass::Linear
            && g_ell.class == GrowthClass::Bounded
            && g_p.class == GrowthClass::Exponential
            && rate_err <= 0.05,
        format!(
            "zero field {:?}, constant field {:?}, P {:?} at rate {:.6} vs {want:.6} ({:.2}% off)",
            g_free.class,
            g_ell.class,
            g_p.class,
            g_p.rate,
            100.0 * rate_err
        ),
    );
    Ok(within_time(out, start.elapsed(), Duration::from_secs(2)))
}

fn generator_identities() -> Result<Outcome> {
    let mut r = rng(8);
    let mut l1 = 0.0f64;
    for _ in 0..20 {
        let t3: f64 = r.gen_range(0.05..2.0) * if r.gen_bool(0.5) { 1.0 } else { -1.0 };
        let t4 = r.gen_range(-2.0..2.0);
        let t = r.gen_range(0.1..2.0);
        let th1 = -t * t3;
        let th2 = -t4 * (-4.0 * t * t3).exp() / (4.0 * t3) + t4 / (4.0 * t3);
        let lhs = compose(&[primitive_map(Primitive::Dilation(-th1)), primitive_map(Primitive::PSquared(th2))]);
        let rhs = exp_quadratic(0.0, t4, t3, 0.0, t);
        // generator of e^{−it(θ₃A + θ₄p²)} exponentiated by nalgebra's Padé scheme
        let pade = (Matrix2::new(2.0 * t3, 2.0 * t4, 0.0, -2.0 * t3) * t).exp();
        let scale = rhs.radial_norm().max(1.0);
        l1 = l1.max(lhs.max_abs_diff(&rhs) / scale).max((rhs.radial - pade).amax() / scale);
    }
    let mut hr = rng(88);
    let mut xi = 0.0f64;
    for _ in 0..20 {
        let nf = floquet::normal_form(&random_hyperbolic(&mut hr))?;
        let b = nf.factorization.b;
        let a3 = nf.root;
        let lhs = compose(&[
            primitive_map(Primitive::Dilation(-a3.ln() / 2.0)),
            primitive_map(Primitive::PSquared(b * a3 * if nf.discriminant > 0.0 { 1.0 } else { -1.0 })),
        ]);
        let rhs = exp_quadratic(0.0, nf.xi1, -nf.xi2, 0.0, 1.0);
        xi = xi.max(lhs.max_abs_diff(&rhs) / rhs.radial_norm().max(1.0));
    }
    Ok(Outcome::new(
        l1 <= 1e-10 && xi <= 1e-10,
        format!("product identity {l1:.2e}, Ξ identity {xi:.2e} (20 draws each)"),
    ))
}

fn theta() -> Result<Outcome> {
    let p = profile_p();
    let nf = floquet::normal_form(&p)?;
    let four = mourre::theta_periodicity_report(&p, &nf, 64, 4)?;
    let eight = mourre::theta_periodicity_report(&p, &nf, 64, 8)?;
    let mut det = 0.0f64;
    for k in 0..=512 {
        let t = k as f64 * 8.0 * p.period() / 512.0;
        det = det.max((mourre::theta(&p, &nf, t)?.determinant() - 1.0).abs());
    }
    let drift = eight.max_period_drift / eight.sup_norm.max(1.0);
    let pass = det <= 1e-9
        && four.sup_deviation <= 1e-8
        && eight.sup_norm.is_finite()
        && eight.bounded
        && drift <= 1e-8;
    Ok(Outcome::new(
        pass,
        format!(
            "|det − 1| {det:.2e}; deviation {:.2e} with sign {:+} over 4 periods; sup|θ| {:.4}, drift {drift:.2e} over 8 periods",
            four.sup_deviation, four.sign_convention, eight.sup_norm
        ),
    ))
}

fn three_pulse() -> Result<Outcome> {
    let mut r = rng(10);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let omegas = [0; 3].map(|_| r.gen_range(0.3..3.0) * if r.gen_bool(0.8) { 1.0 } else { -1.0 });
        let windings = [0; 3].map(|_| r.gen_range(0..2));
        let tp = ThreePulse::quarter_phase(1.0, 2.0, omegas, windings)?;
        let zeta2 = chained_fundamental(&tp.profile()?, tp.durations.iter().sum())[(0, 1)];
        let want = pulses::quarter_phase_zeta2(omegas);
        worst = worst.max((zeta2 - want).abs() / want.abs().max(1.0));
    }
    let sym = ThreePulse::quarter_phase(1.0, 2.0, [1.0; 3], [0; 3])?.profile()?;
    let d_sym = chained_fundamental(&sym, sym.period()).trace();
    let d_unequal = pulses::quarter_phase_discriminant([1.0, 4.0, 1.0]);
    Ok(Outcome::new(
        worst <= 1e-10 && (d_sym + SQRT_2).abs() <= 1e-10,
        format!(
            "ζ₂(T) formula off by {worst:.2e} at 20 points; symmetric point D = {d_sym:.12} (−√2, elliptic, not −2√2); unequal ω = (1, 4, 1) gives D = {d_unequal:.6}"
        ),
    ))
}

fn ermakov() -> Result<Outcome> {
    let oscillator = FieldProfile::oscillator(
        1.0,
        3.1,
        vec![Segment::new(0.7, 1.2), Segment::new(1.6, 0.5), Segment::new(0.2, 1.4)],
        1,
    )?;
    let mut ratios = Vec::new();
    let mut lines = Vec::new();
    for (name, p) in [("P", profile_p()), ("D = 3", profile_positive()), ("oscillator", oscillator)] {
        let residuals = |n: usize| -> Result<(f64, f64)> {
            let times: Vec<f64> = (0..=n).map(|k| k as f64 * p.period() / n as f64).collect();
            let polar = hill::polar_decompose(&p, &hill::trajectory(&p, &times, Method::ClosedForm)?)?;
            Ok((polar.ermakov_residual.unwrap_or(f64::NAN), polar.phase_residual.unwrap_or(f64::NAN)))
        };
        let (e1, p1) = residuals(400)?;
        let (e2, p2) = residuals(800)?;
        ratios.extend([e1 / e2, p1 / p2]);
        lines.push(format!("{name}: ×{:.2} ×{:.2}", e1 / e2, p1 / p2));
    }
    let pass = ratios.iter().all(|&x| x >= 3.5);
    Ok(Outcome::new(pass, format!("residual reduction (ρ, η) under halving: {}", lines.join("; "))))
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 11] = [
        ("wronskian", wronskian),
        ("oracle_equivalence", oracle_equivalence),
        ("factorization", factorization),
        ("normal_form", normal_form_conjugation),
        ("power_matrix", power_matrix),
        ("cross_period", cross_period),
        ("growth_trichotomy", growth),
        ("generator_identities", generator_identities),
        ("theta_matrix", theta),
        ("three_pulse", three_pulse),
        ("ermakov_convergence", ermakov),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        if !outcome.pass {
            failures += 1;
        }
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name}: {}", i + 1, outcome.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
