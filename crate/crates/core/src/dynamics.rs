//! Heisenberg maps at arbitrary times and Gaussian moment transport.
//!
//! A [`RadialSymplecticMap`] `S` for `U(t)` sends the operators `(x, p)` to
//! `U*·(x, p)·U`. Expectations in the evolved state `U ψ` are therefore
//! `S` applied to expectations in `ψ`, so means move by `S·mean` and
//! covariances by `S·cov·Sᵀ`.

use nalgebra::{Matrix2, Matrix4, Vector4};
use serde::Serialize;

use crate::error::{FloquetError, Result};
use crate::floquet;
use crate::hill;
use crate::profiles::FieldProfile;
use crate::symplectic::{transfer_to_map, RadialSymplecticMap};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    /// `(⟨x₁⟩, ⟨x₂⟩, ⟨p₁⟩, ⟨p₂⟩)`
    pub mean: Vector4<f64>,
    pub cov: Matrix4<f64>,
}

impl GaussianState {
    /// Checks symmetry (relative 1e-12) and positive definiteness.
    pub fn new(mean: Vector4<f64>, cov: Matrix4<f64>) -> Result<Self> {
        let scale = cov.amax().max(f64::MIN_POSITIVE);
        if (cov - cov.transpose()).amax() > 1e-12 * scale {
            return Err(FloquetError::Config("covariance is not symmetric".into()));
        }
        if !mean.iter().chain(cov.iter()).all(|v| v.is_finite()) {
            return Err(FloquetError::Config("state has non-finite entries".into()));
        }
        if cov.cholesky().is_none() {
            return Err(FloquetError::Config("covariance is not positive definite".into()));
        }
        Ok(Self { mean, cov })
    }

    /// Minimum-uncertainty packet centred at `x = (1, 0)` with `cov = I/2`.
    pub fn displaced_vacuum() -> Self {
        Self { mean: Vector4::new(1.0, 0.0, 0.0, 0.0), cov: Matrix4::identity() * 0.5 }
    }

    /// `⟨x₁²⟩ + ⟨x₂²⟩`.
    pub fn position_second_moment(&self) -> f64 {
        self.position_variance() + self.mean[0].powi(2) + self.mean[1].powi(2)
    }

    /// `Var x₁ + Var x₂`.
    pub fn position_variance(&self) -> f64 {
        self.cov[(0, 0)] + self.cov[(1, 1)]
    }

    /// `Var p₁ + Var p₂`.
    pub fn momentum_variance(&self) -> f64 {
        self.cov[(2, 2)] + self.cov[(3, 3)]
    }
}

/// `S·mean` and `S·cov·Sᵀ` with `S` the 4×4 expansion of `map`.
pub fn evolve_gaussian(state: &GaussianState, map: &RadialSymplecticMap) -> GaussianState {
    let s = map.phase_space_matrix();
    GaussianState { mean: s * state.mean, cov: s * state.cov * s.transpose() }
}

/// Heisenberg map of `U₀(t, 0) = U₀(t − NT, 0)·U₀(T, 0)ᴺ`.
///
/// The monodromy power comes from the normal form when it exists and from
/// repeated squaring otherwise.
pub fn heisenberg_map(profile: &FieldProfile, t: f64) -> Result<RadialSymplecticMap> {
    let (n, local) = local_map(profile, t)?;
    let mono = floquet::monodromy(profile)?;
    let power = if mono.assumption_holds() {
        let nf = floquet::normal_form_from(profile, &mono)?;
        floquet::power_matrix(&nf, n) * nf.sign(n)
    } else {
        mono.a_matrix.pow(n as u32)
    };
    Ok(RadialSymplecticMap::new(local.radial * power, profile.omega_phase(t)))
}

fn local_map(profile: &FieldProfile, t: f64) -> Result<(u64, RadialSymplecticMap)> {
    if !(t >= 0.0) {
        return Err(FloquetError::AssumptionViolation(format!("negative time {t}")));
    }
    let (n, tau) = profile.reduce(t);
    let pair = hill::fundamental_closed_form(profile, tau);
    Ok((n as u64, transfer_to_map(&pair, profile.mass(), 0.0)))
}

/// A map stored as `e^{log_scale}·map.radial`, for times where the radial
/// entries would overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledMap {
    pub map: RadialSymplecticMap,
    pub log_scale: f64,
}

impl ScaledMap {
    fn normalized(radial: Matrix2<f64>, rot: f64, log_scale: f64) -> Self {
        let s = radial.amax();
        if s > 0.0 && s.is_finite() {
            Self { map: RadialSymplecticMap::new(radial / s, rot), log_scale: log_scale + s.ln() }
        } else {
            Self { map: RadialSymplecticMap::new(radial, rot), log_scale }
        }
    }

    pub fn unscaled(&self) -> RadialSymplecticMap {
        RadialSymplecticMap::new(self.map.radial * self.log_scale.exp(), self.map.rot)
    }
}

/// Heisenberg map in log-scaled form; valid far beyond the `cosh` overflow.
pub fn heisenberg_map_scaled(profile: &FieldProfile, t: f64) -> Result<ScaledMap> {
    let (mut n, local) = local_map(profile, t)?;
    let mono = floquet::monodromy(profile)?;
    let mut base = ScaledMap::normalized(mono.a_matrix, 0.0, 0.0);
    let mut acc = ScaledMap::normalized(Matrix2::identity(), 0.0, 0.0);
    while n > 0 {
        if n & 1 == 1 {
            acc = ScaledMap::normalized(
                base.map.radial * acc.map.radial,
                0.0,
                base.log_scale + acc.log_scale,
            );
        }
        base = ScaledMap::normalized(base.map.radial * base.map.radial, 0.0, 2.0 * base.log_scale);
        n >>= 1;
    }
    Ok(ScaledMap::normalized(
        local.radial * acc.map.radial,
        profile.omega_phase(t),
        acc.log_scale,
    ))
}

/// `½·log⟨|x|²⟩` of the state evolved by a scaled map.
pub fn log_position_norm(state: &GaussianState, map: &ScaledMap) -> f64 {
    let moved = evolve_gaussian(state, &map.map);
    map.log_scale + 0.5 * moved.position_second_moment().ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GrowthClass {
    Bounded,
    Linear,
    Exponential,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub class: GrowthClass,
    /// Least-squares slope of `r_N` against `NT` over the second half of the window.
    pub rate: f64,
    /// Least-squares slope of `r_N` against `log N` over the whole window.
    pub log_log_slope: f64,
    /// `sup r_N − inf r_N`.
    pub range: f64,
    /// `r_N = ½·log⟨|x|²⟩` at `t = NT`, `N = 1..=N_max`.
    pub log_norms: Vec<f64>,
}

/// Classifies the growth of `⟨|x|²⟩` at integer periods.
///
/// Exponential when the late-window slope accounts for more than a factor 10
/// in `‖x‖` over the second half of the window; otherwise Linear when
/// `r_N ≈ c + k·log N` with `k ≥ ½`, else Bounded.
pub fn growth_rate(profile: &FieldProfile, n_max: u32, state: &GaussianState) -> Result<GrowthReport> {
    if n_max < 8 {
        return Err(FloquetError::Config(format!("growth window needs N_max ≥ 8, got {n_max}")));
    }
    let period = profile.period();
    let log_norms = (1..=n_max)
        .map(|n| {
            let map = heisenberg_map_scaled(profile, n as f64 * period)?;
            Ok(log_position_norm(state, &map))
        })
        .collect::<Result<Vec<f64>>>()?;
    if !log_norms.iter().all(|v| v.is_finite()) {
        return Err(FloquetError::NumericalFailure("non-finite moment during growth scan".into()));
    }

    let half = (n_max / 2) as usize;
    let late: Vec<(f64, f64)> = (half..n_max as usize)
        .map(|i| ((i + 1) as f64 * period, log_norms[i]))
        .collect();
    let rate = ls_slope(&late);
    let all: Vec<(f64, f64)> =
        log_norms.iter().enumerate().map(|(i, &r)| (((i + 1) as f64).ln(), r)).collect();
    let log_log_slope = ls_slope(&all);
    let (lo, hi) = log_norms
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| (lo.min(r), hi.max(r)));

    let span = period * (n_max as usize - half) as f64;
    let class = if rate * span > std::f64::consts::LN_10 {
        GrowthClass::Exponential
    } else if log_log_slope >= 0.5 {
        GrowthClass::Linear
    } else {
        GrowthClass::Bounded
    };
    Ok(GrowthReport { class, rate, log_log_slope, range: hi - lo, log_norms })
}

fn ls_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mx, my) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = points
        .iter()
        .fold((0.0, 0.0), |(sxy, sxx), (x, y)| (sxy + (x - mx) * (y - my), sxx + (x - mx).powi(2)));
    sxy / sxx
}
