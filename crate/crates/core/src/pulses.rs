//! Closed forms for pulsed fields: the three-pulse family and the single
//! pulse followed by free flight.
//!
//! Frequencies here are cyclotron frequencies `ωₖ = qBₖ/m = 2νₖ`, and the
//! phases are `ωₖΔₖ/2 = νₖΔₖ`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, TAU};

use crate::error::{FloquetError, Result};
use crate::profiles::{FieldProfile, Mode, Segment};

/// Three consecutive constant-field pulses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreePulse {
    pub mass: f64,
    pub charge: f64,
    pub omegas: [f64; 3],
    pub durations: [f64; 3],
}

impl ThreePulse {
    pub fn profile(&self) -> Result<FieldProfile> {
        let segments = self
            .omegas
            .iter()
            .zip(self.durations)
            .map(|(&w, d)| Segment::new(self.mass * w / self.charge, d))
            .collect();
        FieldProfile::from_segments(self.mass, self.charge, segments, Mode::Magnetic)
    }

    /// `D` from the phase cosines and sines `cₖ, sₖ`; all `ωₖ` must be nonzero.
    pub fn discriminant(&self) -> f64 {
        let [w1, w2, w3] = self.omegas;
        let [(s1, c1), (s2, c2), (s3, c3)] =
            [0, 1, 2].map(|k| (self.omegas[k] * self.durations[k] / 2.0).sin_cos());
        let k = |a: f64, b: f64| (a * a + b * b) / (a * b);
        (2.0 * c1 * c2 - k(w1, w2) * s1 * s2) * c3 - (k(w2, w3) * c1 * s2 + k(w1, w3) * s1 * c2) * s3
    }

    /// Equal quarter phases `ωₖΔₖ/2 ≡ π/4 (mod 2π)`, so every `cₖ = sₖ = 1/√2`.
    /// `windings[k]` selects the branch; durations stay positive for either sign of `ωₖ`.
    pub fn quarter_phase(mass: f64, charge: f64, omegas: [f64; 3], windings: [u32; 3]) -> Result<Self> {
        let mut durations = [0.0; 3];
        for k in 0..3 {
            let half = omegas[k] / 2.0;
            if half == 0.0 || !half.is_finite() {
                return Err(FloquetError::Config(format!("pulse {k} needs a nonzero frequency")));
            }
            let turns = windings[k] as f64;
            let phase = if half > 0.0 { FRAC_PI_4 + TAU * turns } else { FRAC_PI_4 - TAU * (turns + 1.0) };
            durations[k] = phase / half;
        }
        Ok(Self { mass, charge, omegas, durations })
    }
}

/// `ζ₂(T)` at a quarter-phase point:
/// `(1/√2)(1/ω₁ + 1/ω₂ + 1/ω₃ − ω₂/(ω₁ω₃))`.
pub fn quarter_phase_zeta2(omegas: [f64; 3]) -> f64 {
    let [w1, w2, w3] = omegas;
    FRAC_1_SQRT_2 * (1.0 / w1 + 1.0 / w2 + 1.0 / w3 - w2 / (w1 * w3))
}

/// `D` at a quarter-phase point: `(1/√2)(1 − (k₁₂ + k₂₃ + k₁₃)/2)` with
/// `k_ij = (ωᵢ² + ωⱼ²)/(ωᵢωⱼ)`. Equal frequencies give `−√2`.
pub fn quarter_phase_discriminant(omegas: [f64; 3]) -> f64 {
    let [w1, w2, w3] = omegas;
    let k = |a: f64, b: f64| (a * a + b * b) / (a * b);
    FRAC_1_SQRT_2 * (1.0 - (k(w1, w2) + k(w2, w3) + k(w1, w3)) / 2.0)
}

/// Trace of the monodromy for a pulse of field `b` lasting `t_b` followed by
/// free flight up to `period`: `2cos(νT_B) − (qB(T−T_B)/(2m)) sin(νT_B)`.
pub fn single_pulse_discriminant(mass: f64, charge: f64, b: f64, t_b: f64, period: f64) -> f64 {
    let nu = charge * b / (2.0 * mass);
    2.0 * (nu * t_b).cos() - nu * (period - t_b) * (nu * t_b).sin()
}

/// The commonly quoted single-pulse expression
/// `2cos(qBT_B/(2m)) − qB(T−T_B) sin(qBT_B/(2m))/2`. It agrees with
/// [`single_pulse_discriminant`] only for `m = 1`.
pub fn cited_pulsed_discriminant(mass: f64, charge: f64, b: f64, t_b: f64, period: f64) -> f64 {
    let phase = charge * b * t_b / (2.0 * mass);
    2.0 * phase.cos() - charge * b * (period - t_b) * phase.sin() / 2.0
}
