//! Monodromy, stability classification and the hyperbolic normal form.

use nalgebra::{Complex, Matrix2};
use serde::Serialize;

use crate::error::{FloquetError, Result};
use crate::hill::{self, FundamentalPair, Method};
use crate::profiles::FieldProfile;
use crate::symplectic::{
    compose, exp_quadratic, primitive_map, Factorization, Primitive, RadialSymplecticMap,
};

/// Relative threshold below which `ζ₂(T)` counts as zero.
pub const ZETA2_ZERO_RTOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

impl Stability {
    /// Classifies `D` with the band `ε = 1e-9·max(1, D²)` around `D² = 4`.
    pub fn classify(d: f64) -> Self {
        Self::classify_with_band(d, 1e-9)
    }

    pub fn classify_with_band(d: f64, rel_band: f64) -> Self {
        let d2 = d * d;
        let eps = rel_band * d2.max(1.0);
        if d2 > 4.0 + eps {
            Stability::Hyperbolic
        } else if d2 < 4.0 - eps {
            Stability::Elliptic
        } else {
            Stability::Parabolic
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Elliptic => "elliptic",
            Stability::Parabolic => "parabolic",
            Stability::Hyperbolic => "hyperbolic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonodromyData {
    pub pair_t: FundamentalPair,
    pub discriminant: f64,
    /// `[[ζ₁(T), ζ₂(T)/m], [mζ₁'(T), ζ₂'(T)]]`
    pub a_matrix: Matrix2<f64>,
    pub omega_t: f64,
    pub stability: Stability,
}

impl MonodromyData {
    /// `ζ₂(T)` is treated as zero relative to the size of the pair.
    pub fn zeta2_vanishes(&self) -> bool {
        self.pair_t.zeta2.abs() <= ZETA2_ZERO_RTOL * self.pair_t.norm()
    }

    /// `D² > 4` and `ζ₂(T) ≠ 0`.
    pub fn assumption_holds(&self) -> bool {
        self.stability == Stability::Hyperbolic && !self.zeta2_vanishes()
    }
}

pub fn monodromy(profile: &FieldProfile) -> Result<MonodromyData> {
    let pair_t = hill::fundamental_at(profile, profile.period(), Method::ClosedForm)?;
    let m = profile.mass();
    let discriminant = pair_t.zeta1 + pair_t.dzeta2;
    if !discriminant.is_finite() {
        return Err(FloquetError::NumericalFailure("non-finite discriminant".into()));
    }
    Ok(MonodromyData {
        pair_t,
        discriminant,
        a_matrix: Matrix2::new(pair_t.zeta1, pair_t.zeta2 / m, m * pair_t.dzeta1, pair_t.dzeta2),
        omega_t: profile.omega_period(),
        stability: Stability::classify(discriminant),
    })
}

/// Floquet multipliers `λ± = D/2 ± √(D²/4 − 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Multipliers {
    Real(f64, f64),
    /// `re ± i·im` on the unit circle.
    Conjugate { re: f64, im: f64 },
}

impl Multipliers {
    pub fn as_complex(&self) -> [Complex<f64>; 2] {
        match *self {
            Multipliers::Real(a, b) => [Complex::new(a, 0.0), Complex::new(b, 0.0)],
            Multipliers::Conjugate { re, im } => [Complex::new(re, im), Complex::new(re, -im)],
        }
    }
}

pub fn multipliers(d: f64) -> Multipliers {
    let half = d / 2.0;
    let disc = half * half - 1.0;
    if disc >= 0.0 {
        let s = disc.sqrt();
        // the small root via the product λ₊λ₋ = 1 avoids cancellation
        let big = half + half.signum() * s;
        let small = if big == 0.0 { 0.0 } else { 1.0 / big };
        if half >= 0.0 {
            Multipliers::Real(big, small)
        } else {
            Multipliers::Real(small, big)
        }
    } else {
        Multipliers::Conjugate { re: half, im: (1.0 - half * half).sqrt() }
    }
}

/// The root `> 1` of `r² − |D|r + 1 = 0`: `a₃` for `D ≥ 2`, `b₃` for `D ≤ −2`.
pub fn hyperbolic_root(d: f64) -> Result<f64> {
    if !(d.abs() >= 2.0) {
        return Err(FloquetError::NotHyperbolic(d));
    }
    let ad = d.abs();
    Ok((ad + ((ad - 2.0) * (ad + 2.0)).sqrt()) / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// `D ≥ 2`, root `a₃`.
    Positive,
    /// `D ≤ −2`, root `b₃`.
    Negative,
}

/// Constants of the hyperbolic normal form
/// `U(T) = e^{−iA_D x²} e^{−iTW₀} e^{iA_D x²}` with
/// `W₀ = (B_D/T)(p² − C_D²x² + D_D L) + πσ_D/T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalForm {
    pub period: f64,
    pub mass: f64,
    pub discriminant: f64,
    pub omega_t: f64,
    pub branch: Branch,
    /// `a₃` or `b₃`.
    pub root: f64,
    /// `a(T), b(T), c(T)`.
    pub factorization: Factorization,
    pub a_d: f64,
    pub b_d: f64,
    pub c_d: f64,
    pub d_d: f64,
    pub sigma_d: u8,
    /// `𝒟 = 2B_D C_D / T`.
    pub cal_d: f64,
    pub sigma: [f64; 4],
    /// `T / (4 B_D C_D)`.
    pub mourre_prefactor: f64,
    /// `(a₀, a₁, a₂)` or `(b₀, b₁, b₂)` depending on the branch.
    pub intermediates: [f64; 3],
    pub xi1: f64,
    pub xi2: f64,
}

pub fn normal_form(profile: &FieldProfile) -> Result<NormalForm> {
    normal_form_from(profile, &monodromy(profile)?)
}

pub fn normal_form_from(profile: &FieldProfile, mono: &MonodromyData) -> Result<NormalForm> {
    let d = mono.discriminant;
    if mono.stability != Stability::Hyperbolic {
        return Err(FloquetError::AssumptionViolation(format!(
            "normal form needs D² > 4, got D = {d}"
        )));
    }
    if mono.zeta2_vanishes() {
        return Err(FloquetError::AssumptionViolation(format!(
            "normal form needs ζ₂(T) ≠ 0, got {}",
            mono.pair_t.zeta2
        )));
    }
    let period = profile.period();
    let mass = profile.mass();
    let f = Factorization::from_pair(&mono.pair_t, mass)?;
    let (a, b) = (f.a, f.b);
    let r = hyperbolic_root(d)?;
    let log_r = r.ln();
    let omega = mono.omega_t;

    let (branch, sigma_d, a_d, b_d, intermediates, shift) = if d > 0.0 {
        let a_d = a + (r - 1.0).powi(2) / (8.0 * r * b);
        let b_d = 2.0 * b * r * log_r / (r * r - 1.0);
        let inter = [r / (4.0 * b) + a - 1.0 / (4.0 * b), -0.5 * log_r, b * r];
        (Branch::Positive, 0u8, a_d, b_d, inter, 0.0)
    } else {
        let a_d = a - (r + 1.0).powi(2) / (8.0 * r * b);
        let b_d = -2.0 * b * r * log_r / (r * r - 1.0);
        let inter = [-r / (4.0 * b) + a - 1.0 / (4.0 * b), -0.5 * log_r, -b * r];
        (Branch::Negative, 1u8, a_d, b_d, inter, std::f64::consts::PI)
    };
    let c_d = (r * r - 1.0) / (4.0 * r * b);
    let d_d = -(omega + shift) / b_d;
    let cal_d = 2.0 * b_d * c_d / period;
    let sigma = [b_d / period, -b_d * c_d * c_d / period, -(omega + shift) / period, shift / period];
    let nf = NormalForm {
        period,
        mass,
        discriminant: d,
        omega_t: omega,
        branch,
        root: r,
        factorization: f,
        a_d,
        b_d,
        c_d,
        d_d,
        sigma_d,
        cal_d,
        sigma,
        mourre_prefactor: period / (4.0 * b_d * c_d),
        intermediates,
        xi1: b_d,
        xi2: log_r / 2.0,
    };
    let finite = [a_d, b_d, c_d, d_d, cal_d, nf.mourre_prefactor].iter().all(|v| v.is_finite());
    if !finite {
        return Err(FloquetError::NumericalFailure(format!(
            "normal form constants are not finite for D = {d}"
        )));
    }
    Ok(nf)
}

impl NormalForm {
    /// `(−1)^{σ_D N}`.
    pub fn sign(&self, n: u64) -> f64 {
        if self.sigma_d == 1 && n % 2 == 1 {
            -1.0
        } else {
            1.0
        }
    }

    /// Phase-space map of `e^{−itW₀}` (the scalar `πσ_D/T` is a global phase).
    pub fn w0_map(&self, t: f64) -> RadialSymplecticMap {
        exp_quadratic(self.sigma[1], self.sigma[0], 0.0, -self.sigma[2], t)
    }

    /// Map of `e^{−iA_D x²} e^{−itW₀} e^{iA_D x²}`; at `t = NT` this is the
    /// `N`-period propagator.
    pub fn conjugated_map(&self, t: f64) -> RadialSymplecticMap {
        compose(&[
            primitive_map(Primitive::XSquared(self.a_d)),
            self.w0_map(t),
            primitive_map(Primitive::XSquared(-self.a_d)),
        ])
    }
}

/// `M_N` with `𝒜ᴺ = (−1)^{σ_D N} M_N`.
pub fn power_matrix(nf: &NormalForm, n: u64) -> Matrix2<f64> {
    let x = n as f64 * nf.period * nf.cal_d;
    let (ch, sh) = (x.cosh(), x.sinh());
    let (a, c) = (nf.a_d, nf.c_d);
    Matrix2::new(
        ch + 2.0 * a / c * sh,
        sh / c,
        c * sh - 4.0 * a * a / c * sh,
        ch - 2.0 * a / c * sh,
    )
}

/// Fundamental pair at `t ≥ 0` from the local pair at `t − NT` and `M_N`.
pub fn cross_period(profile: &FieldProfile, nf: &NormalForm, t: f64) -> Result<FundamentalPair> {
    if !(t >= 0.0) {
        return Err(FloquetError::AssumptionViolation(format!("negative time {t}")));
    }
    let (n, tau) = profile.reduce(t);
    let n = n as u64;
    let m = profile.mass();
    let local = hill::fundamental_at(profile, tau, Method::ClosedForm)?;
    let l = Matrix2::new(local.zeta1, local.zeta2 / m, m * local.dzeta1, local.dzeta2);
    let bm = l * power_matrix(nf, n);
    let s = nf.sign(n);
    Ok(FundamentalPair {
        t,
        zeta1: s * bm[(0, 0)],
        zeta2: s * m * bm[(0, 1)],
        dzeta1: s * bm[(1, 0)] / m,
        dzeta2: s * bm[(1, 1)],
    })
}
