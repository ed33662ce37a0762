//! Fundamental solutions of Hill's equation `ζ'' + ν(t)² ζ = 0`.
//!
//! `ζ₁` starts from `(1, 0)` and `ζ₂` from `(0, 1)` in `(ζ, ζ')`. On a
//! piecewise-constant profile they are products of per-segment transfer
//! matrices; the numeric route integrates the same equation with the
//! adaptive Dormand–Prince pair and serves as an independent check.

use nalgebra::Matrix2;
use serde::Serialize;

use crate::error::{FloquetError, Result};
use crate::ode::{self, Tolerances};
use crate::profiles::FieldProfile;

/// Below this `|νΔ|` the `sin(νΔ)/ν` entry is evaluated by its Taylor series.
pub const SERIES_THRESHOLD: f64 = 1e-6;

/// Maps `(ζ(t₀), ζ'(t₀))` to `(ζ(t₁), ζ'(t₁))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix(pub Matrix2<f64>);

impl TransferMatrix {
    pub fn identity() -> Self {
        Self(Matrix2::identity())
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.0;
        m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
    }

    pub fn trace(&self) -> f64 {
        self.0[(0, 0)] + self.0[(1, 1)]
    }

    /// `self` applied after `earlier`.
    pub fn after(&self, earlier: &TransferMatrix) -> TransferMatrix {
        TransferMatrix(self.0 * earlier.0)
    }

    pub fn pow(&self, mut n: u64) -> TransferMatrix {
        let mut base = self.0;
        let mut acc = Matrix2::identity();
        while n > 0 {
            if n & 1 == 1 {
                acc *= base;
            }
            base *= base;
            n >>= 1;
        }
        TransferMatrix(acc)
    }
}

/// Constant-coefficient transfer over one segment:
/// `[[cos νΔ, sin(νΔ)/ν], [−ν sin νΔ, cos νΔ]]`.
pub fn segment_transfer(nu: f64, delta: f64) -> TransferMatrix {
    let x = nu * delta;
    let (c, s_over_nu, nu_s) = if x.abs() < SERIES_THRESHOLD {
        let x2 = x * x;
        (
            1.0 - x2 / 2.0 + x2 * x2 / 24.0,
            delta * (1.0 - x2 / 6.0 + x2 * x2 / 120.0),
            nu * nu * delta * (1.0 - x2 / 6.0),
        )
    } else {
        let (s, c) = x.sin_cos();
        (c, s / nu, nu * s)
    };
    TransferMatrix(Matrix2::new(c, s_over_nu, -nu_s, c))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Products of segment transfer matrices.
    ClosedForm,
    /// Adaptive Dormand–Prince integration with boundary-aligned steps.
    Numeric,
}

/// `(ζ₁, ζ₂, ζ₁', ζ₂')` at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FundamentalPair {
    pub t: f64,
    pub zeta1: f64,
    pub zeta2: f64,
    pub dzeta1: f64,
    pub dzeta2: f64,
}

impl FundamentalPair {
    pub fn initial() -> Self {
        Self { t: 0.0, zeta1: 1.0, zeta2: 0.0, dzeta1: 0.0, dzeta2: 1.0 }
    }

    /// Reads the pair from a fundamental matrix `[[ζ₁, ζ₂], [ζ₁', ζ₂']]`.
    pub fn from_matrix(t: f64, m: &Matrix2<f64>) -> Self {
        Self { t, zeta1: m[(0, 0)], zeta2: m[(0, 1)], dzeta1: m[(1, 0)], dzeta2: m[(1, 1)] }
    }

    pub fn matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.zeta1, self.zeta2, self.dzeta1, self.dzeta2)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.zeta1, self.zeta2, self.dzeta1, self.dzeta2]
    }

    pub fn wronskian(&self) -> f64 {
        wronskian(self)
    }

    /// Euclidean norm of the four components.
    pub fn norm(&self) -> f64 {
        self.as_array().iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// `ζ₁ζ₂' − ζ₁'ζ₂`.
pub fn wronskian(pair: &FundamentalPair) -> f64 {
    pair.zeta1 * pair.dzeta2 - pair.dzeta1 * pair.zeta2
}

/// One-period transfer matrix (the monodromy of Hill's equation).
pub fn period_transfer(profile: &FieldProfile) -> TransferMatrix {
    partial_transfer(profile, profile.period())
}

/// Transfer over `[0, tau]` for `tau ∈ [0, T]`.
pub fn partial_transfer(profile: &FieldProfile, tau: f64) -> TransferMatrix {
    profile
        .pieces_until(tau)
        .fold(TransferMatrix::identity(), |acc, (nu, dt)| segment_transfer(nu, dt).after(&acc))
}

/// Fundamental pair at `t ≥ 0`, with the numeric route at default tolerances.
pub fn fundamental_at(profile: &FieldProfile, t: f64, method: Method) -> Result<FundamentalPair> {
    match method {
        Method::ClosedForm => Ok(fundamental_closed_form(profile, t)),
        Method::Numeric => fundamental_numeric(profile, t, Tolerances::default()),
    }
}

pub fn fundamental_closed_form(profile: &FieldProfile, t: f64) -> FundamentalPair {
    let (n, tau) = profile.reduce(t);
    let whole = period_transfer(profile).pow(n.max(0) as u64);
    let m = partial_transfer(profile, tau).after(&whole);
    FundamentalPair::from_matrix(t, &m.0)
}

/// Integrates both fundamental solutions from 0 to `t`, stopping at every
/// segment boundary so that no step straddles a jump of `ν`.
pub fn fundamental_numeric(
    profile: &FieldProfile,
    t: f64,
    tol: Tolerances,
) -> Result<FundamentalPair> {
    if !(t >= 0.0) {
        return Err(FloquetError::NumericalFailure(format!("negative time {t}")));
    }
    // state: (ζ₁, ζ₁', ζ₂, ζ₂')
    let mut y = [1.0, 0.0, 0.0, 1.0];
    'periods: for n in 0.. {
        let base = n as f64 * profile.period();
        for (&start, &nu) in profile.segment_starts().iter().zip(profile.segment_nus()) {
            let seg_start = base + start;
            if seg_start >= t {
                break 'periods;
            }
            let next = profile
                .segment_starts()
                .iter()
                .map(|&s| base + s)
                .find(|&s| s > seg_start)
                .unwrap_or(base + profile.period());
            let end = next.min(t);
            let w2 = nu * nu;
            let rhs = |_: f64, y: &[f64; 4]| [y[1], -w2 * y[0], y[3], -w2 * y[2]];
            y = ode::integrate(rhs, seg_start, y, end, tol)?.0;
        }
    }
    Ok(FundamentalPair { t, zeta1: y[0], zeta2: y[2], dzeta1: y[1], dzeta2: y[3] })
}

/// Fundamental pairs on a grid of times.
pub fn trajectory(
    profile: &FieldProfile,
    times: &[f64],
    method: Method,
) -> Result<Vec<FundamentalPair>> {
    times.iter().map(|&t| fundamental_at(profile, t, method)).collect()
}

/// Polar amplitude `ρ` and unwrapped phase `η` with `ζ₁ = ρ cos η`, `ζ₂ = ρ sin η`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolarPair {
    pub t: f64,
    pub rho: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarTrace {
    pub points: Vec<PolarPair>,
    /// Max over interior samples of `|ρ'' − ρ⁻³ + ν²ρ|` by central differences.
    pub ermakov_residual: Option<f64>,
    /// Max over interior samples of `|η' − ρ⁻²|` by central differences.
    pub phase_residual: Option<f64>,
}

/// Polar (amplitude–phase) form of a sampled trajectory.
///
/// Successive raw angles must differ by less than `π/2` after nearest-branch
/// continuation. Residuals skip samples whose difference stencil straddles a
/// segment boundary, where `ρ''` jumps; they are `None` when no sample
/// qualifies.
pub fn polar_decompose(profile: &FieldProfile, trajectory: &[FundamentalPair]) -> Result<PolarTrace> {
    let mut points = Vec::with_capacity(trajectory.len());
    let mut prev_raw = 0.0;
    let mut eta = 0.0;
    for (i, p) in trajectory.iter().enumerate() {
        let raw = p.zeta2.atan2(p.zeta1);
        if i == 0 {
            eta = raw;
        } else {
            let jump = wrap_angle(raw - prev_raw);
            if jump.abs() >= std::f64::consts::FRAC_PI_2 {
                return Err(FloquetError::Unwrap { index: i - 1, jump });
            }
            eta += jump;
        }
        prev_raw = raw;
        points.push(PolarPair { t: p.t, rho: p.zeta1.hypot(p.zeta2), eta });
    }

    let mut ermakov: Option<f64> = None;
    let mut phase: Option<f64> = None;
    for w in points.windows(3) {
        let (a, b, c) = (w[0], w[1], w[2]);
        if boundary_strictly_between(profile, a.t, c.t) {
            continue;
        }
        let (hm, hp) = (b.t - a.t, c.t - b.t);
        let d2rho = 2.0 * ((c.rho - b.rho) / hp - (b.rho - a.rho) / hm) / (hp + hm);
        let nu = profile.nu_at(b.t);
        let r1 = (d2rho - b.rho.powi(-3) + nu * nu * b.rho).abs();
        let deta = (hm * hm * (c.eta - b.eta) + hp * hp * (b.eta - a.eta)) / (hm * hp * (hm + hp));
        let r2 = (deta - b.rho.powi(-2)).abs();
        ermakov = Some(ermakov.map_or(r1, |m| m.max(r1)));
        phase = Some(phase.map_or(r2, |m| m.max(r2)));
    }
    Ok(PolarTrace { points, ermakov_residual: ermakov, phase_residual: phase })
}

fn wrap_angle(a: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    a - tau * (a / tau).round()
}

/// (period index, segment index) of `t` under the right-continuous convention.
fn piece_of(profile: &FieldProfile, t: f64) -> (i64, usize) {
    let (n, tau) = profile.reduce(t);
    let k = profile.segment_starts().partition_point(|&s| s <= tau).saturating_sub(1);
    (n, k)
}

/// True if a jump of `ν` lies strictly inside `(a, b)`.
fn boundary_strictly_between(profile: &FieldProfile, a: f64, b: f64) -> bool {
    let pa = piece_of(profile, a);
    let pb = piece_of(profile, b);
    if pa == pb {
        return false;
    }
    let count = profile.segments().len();
    let successor = if pa.1 + 1 < count { (pa.0, pa.1 + 1) } else { (pa.0 + 1, 0) };
    if pb != successor {
        return true;
    }
    let start = pb.0 as f64 * profile.period() + profile.segment_starts()[pb.1];
    b != start
}
