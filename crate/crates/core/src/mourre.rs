//! Coefficient matrices of the conjugate-operator construction for
//! hyperbolic profiles.
//!
//! `θ(t)` is the radial part of the inverse of the map
//! `U₀(t)·e^{−iA_D x²}·e^{itW₀}·e^{iX₀x²}·e^{−iX₁p²}`, i.e.
//! `θ = Q₁·Q₂(t)·Q₃(t)` with
//!
//! ```text
//! Q₁    = [[1 + 4X₀X₁, −2X₁], [−2X₀, 1]]
//! Q₂(t) = [[cosh t𝒟 + (2A_D/C_D) sinh t𝒟, sinh t𝒟 / C_D],
//!          [2A_D cosh t𝒟 + C_D sinh t𝒟,   cosh t𝒟     ]]
//! Q₃(t) = [[ζ₂'(t), −ζ₂(t)/m], [−mζ₁'(t), ζ₁(t)]]
//! ```
//!
//! and planar rotation `Ω₁(t) = Ω(T)t/T − Ω(t)`. The exponential growth of
//! `Q₂` cancels against that of `Q₃`, leaving `θ` bounded and periodic up to
//! the sign `(−1)^{σ_D}`.

use nalgebra::Matrix2;
use serde::Serialize;

use crate::error::{FloquetError, Result};
use crate::floquet::NormalForm;
use crate::hill;
use crate::profiles::FieldProfile;

/// `X₀ = √(−Σ₂/Σ₁)/2` and `X₁ = −√(−Σ₁/Σ₂)/4`.
pub fn xk_constants(nf: &NormalForm) -> Result<(f64, f64)> {
    let [s1, s2, ..] = nf.sigma;
    if !(s1 * s2 < 0.0) {
        return Err(FloquetError::AssumptionViolation(format!(
            "X₀, X₁ need Σ₁Σ₂ < 0, got Σ₁ = {s1}, Σ₂ = {s2}"
        )));
    }
    Ok(((-s2 / s1).sqrt() / 2.0, -(-s1 / s2).sqrt() / 4.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QMatrices {
    pub q1: Matrix2<f64>,
    pub q2: Matrix2<f64>,
    pub q3: Matrix2<f64>,
    /// `Ω₁(t)`
    pub rot1: f64,
}

pub fn q_matrices(profile: &FieldProfile, nf: &NormalForm, t: f64) -> Result<QMatrices> {
    let (x0, x1) = xk_constants(nf)?;
    let q1 = Matrix2::new(1.0 + 4.0 * x0 * x1, -2.0 * x1, -2.0 * x0, 1.0);

    let (ch, sh) = ((t * nf.cal_d).cosh(), (t * nf.cal_d).sinh());
    let (a, c) = (nf.a_d, nf.c_d);
    let q2 = Matrix2::new(ch + 2.0 * a / c * sh, sh / c, 2.0 * a * ch + c * sh, ch);

    let pair = hill::fundamental_closed_form(profile, t);
    let m = profile.mass();
    let q3 = Matrix2::new(pair.dzeta2, -pair.zeta2 / m, -m * pair.dzeta1, pair.zeta1);

    let rot1 = profile.omega_period() * t / profile.period() - profile.omega_phase(t);
    Ok(QMatrices { q1, q2, q3, rot1 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaMatrix {
    pub t: f64,
    /// `[[θ₁, θ₂], [θ₃, θ₄]]`
    pub theta: Matrix2<f64>,
    pub rot: f64,
}

impl ThetaMatrix {
    pub fn entries(&self) -> [f64; 4] {
        let m = &self.theta;
        [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]
    }

    pub fn determinant(&self) -> f64 {
        self.theta.determinant()
    }
}

pub fn theta(profile: &FieldProfile, nf: &NormalForm, t: f64) -> Result<ThetaMatrix> {
    let q = q_matrices(profile, nf, t)?;
    Ok(ThetaMatrix { t, theta: q.q1 * q.q2 * q.q3, rot: q.rot1 })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicityReport {
    pub samples: usize,
    pub periods: usize,
    /// `sup ‖θ(t+T) − ε·θ(t)‖_∞` for the better of `ε = ±1`.
    pub sup_deviation: f64,
    /// The sign `ε` achieving `sup_deviation`.
    pub sign_convention: i8,
    /// `sup |θ_j(t)|` over the whole grid.
    pub sup_norm: f64,
    /// Largest increase of the per-period `sup |θ_j|` from one period to the next.
    pub max_period_drift: f64,
    /// `sup |Ω₁(t+T) − Ω₁(t)|`.
    pub rot_deviation: f64,
    /// `sup |det θ − 1|`.
    pub det_deviation: f64,
    pub bounded: bool,
}

/// Samples `θ` at `samples` points per period over `[0, periods·T]`.
pub fn theta_periodicity_report(
    profile: &FieldProfile,
    nf: &NormalForm,
    samples: usize,
    periods: usize,
) -> Result<PeriodicityReport> {
    if samples < 16 || periods < 2 {
        return Err(FloquetError::Config(format!(
            "periodicity report needs samples ≥ 16 and periods ≥ 2, got {samples} and {periods}"
        )));
    }
    let period = profile.period();
    let total = samples * periods;
    let grid = (0..=total)
        .map(|k| theta(profile, nf, k as f64 * period / samples as f64))
        .collect::<Result<Vec<_>>>()?;

    let mut dev = [0.0f64; 2];
    let mut rot_deviation = 0.0f64;
    for (now, later) in grid.iter().zip(&grid[samples..]) {
        for (slot, eps) in dev.iter_mut().zip([1.0, -1.0]) {
            *slot = slot.max((later.theta - now.theta * eps).amax());
        }
        rot_deviation = rot_deviation.max((later.rot - now.rot).abs());
    }
    let (sup_deviation, sign_convention) = if dev[0] <= dev[1] { (dev[0], 1) } else { (dev[1], -1) };

    let per_period: Vec<f64> = grid[..total]
        .chunks(samples)
        .map(|c| c.iter().map(|th| th.theta.amax()).fold(0.0, f64::max))
        .collect();
    let sup_norm = grid.iter().map(|th| th.theta.amax()).fold(0.0, f64::max);
    let max_period_drift =
        per_period.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max).max(0.0);
    let det_deviation = grid.iter().map(|th| (th.determinant() - 1.0).abs()).fold(0.0, f64::max);

    Ok(PeriodicityReport {
        samples,
        periods,
        sup_deviation,
        sign_convention,
        sup_norm,
        max_period_drift,
        rot_deviation,
        det_deviation,
        bounded: sup_norm.is_finite() && max_period_drift < 1e-6,
    })
}
