//! Periodic field profiles.
//!
//! A profile is a piecewise-constant, `T`-periodic coefficient: a magnetic
//! field `B(t)` (Larmor half-frequency `ν = qB/(2m)`) or, in oscillator mode,
//! a frequency `h(t)` with `ν = h/(2m)` and no rotation.
//!
//! Segment boundaries are right-continuous: on `[t_k, t_{k+1})` the field
//! takes the value of segment `k`.

use serde::{Deserialize, Serialize};

use crate::error::{FloquetError, Result};

/// Relative tolerance for `Σ Δ_k = T`.
pub const DURATION_SUM_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Charged particle in the plane, symmetric gauge.
    Magnetic,
    /// Time-periodic harmonic oscillator in `n` dimensions; `L ≡ 0`.
    Oscillator,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    /// `B_k` in magnetic mode, `h_k` in oscillator mode.
    pub field: f64,
    pub duration: f64,
}

impl Segment {
    pub fn new(field: f64, duration: f64) -> Self {
        Self { field, duration }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    mass: f64,
    #[serde(default)]
    charge: Option<f64>,
    period: f64,
    #[serde(default)]
    mode: Option<Mode>,
    #[serde(default)]
    dimension: Option<u32>,
    segments: Vec<Segment>,
}

/// A validated, immutable periodic profile.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldProfile {
    mass: f64,
    charge: f64,
    period: f64,
    mode: Mode,
    dimension: u32,
    segments: Vec<Segment>,
    starts: Vec<f64>,
    nus: Vec<f64>,
    omega_period: f64,
}

impl FieldProfile {
    /// Validates a profile. Durations whose sum misses `period` by at most
    /// `DURATION_SUM_RTOL` (relative) are rescaled to sum exactly; larger
    /// mismatches are rejected.
    pub fn new(
        mass: f64,
        charge: f64,
        period: f64,
        segments: Vec<Segment>,
        mode: Mode,
    ) -> Result<Self> {
        Self::build(mass, charge, period, segments, mode, 2)
    }

    /// Profile whose period is the sum of the segment durations.
    pub fn from_segments(mass: f64, charge: f64, segments: Vec<Segment>, mode: Mode) -> Result<Self> {
        let period = segments.iter().map(|s| s.duration).sum();
        Self::new(mass, charge, period, segments, mode)
    }

    /// Single-segment profile with constant `ν`, built with `m = 1`, `q = 2`
    /// so that the field value equals `ν`.
    pub fn constant_nu(nu: f64, period: f64) -> Result<Self> {
        Self::new(1.0, 2.0, period, vec![Segment::new(nu, period)], Mode::Magnetic)
    }

    /// Oscillator-mode profile in `dimension` dimensions.
    pub fn oscillator(
        mass: f64,
        period: f64,
        segments: Vec<Segment>,
        dimension: u32,
    ) -> Result<Self> {
        Self::build(mass, 1.0, period, segments, Mode::Oscillator, dimension)
    }

    /// Parses and validates the JSON configuration document.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawProfile = serde_json::from_str(text)
            .map_err(|e| FloquetError::Config(format!("invalid profile document: {e}")))?;
        let mode = raw.mode.unwrap_or(Mode::Magnetic);
        let charge = match (mode, raw.charge) {
            (Mode::Magnetic, None) => {
                return Err(FloquetError::Config("missing field `charge`".into()))
            }
            (_, Some(q)) => q,
            (Mode::Oscillator, None) => 1.0,
        };
        let dimension = raw.dimension.unwrap_or(2);
        Self::build(raw.mass, charge, raw.period, raw.segments, mode, dimension)
    }

    /// Resamples a smooth field, given as `(t, value)` samples covering one
    /// period `[0, T]` in increasing time order, onto `pieces` equal segments.
    /// Each segment takes the linearly interpolated value at its midpoint, so
    /// the Hill solutions inherit a second-order error in the segment width.
    pub fn from_samples(
        mass: f64,
        charge: f64,
        mode: Mode,
        samples: &[(f64, f64)],
        pieces: usize,
    ) -> Result<Self> {
        if samples.len() < 2 {
            return Err(FloquetError::Config("need at least two field samples".into()));
        }
        if pieces == 0 {
            return Err(FloquetError::Config("need at least one segment".into()));
        }
        if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(FloquetError::Config("sample times must be strictly increasing".into()));
        }
        let t0 = samples[0].0;
        let period = samples[samples.len() - 1].0 - t0;
        let width = period / pieces as f64;
        let segments = (0..pieces)
            .map(|k| {
                let mid = t0 + (k as f64 + 0.5) * width;
                Segment::new(interpolate(samples, mid), width)
            })
            .collect();
        Self::new(mass, charge, period, segments, mode)
    }

    fn build(
        mass: f64,
        charge: f64,
        period: f64,
        mut segments: Vec<Segment>,
        mode: Mode,
        dimension: u32,
    ) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(FloquetError::Config(format!("mass must be positive, got {mass}")));
        }
        if !charge.is_finite() {
            return Err(FloquetError::Config(format!("charge must be finite, got {charge}")));
        }
        if mode == Mode::Magnetic && charge == 0.0 {
            return Err(FloquetError::Config("charge must be nonzero in magnetic mode".into()));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(FloquetError::Config(format!("period must be positive, got {period}")));
        }
        match mode {
            Mode::Magnetic if dimension != 2 => {
                return Err(FloquetError::Config(format!(
                    "magnetic mode is two-dimensional, got dimension {dimension}"
                )))
            }
            Mode::Oscillator if dimension == 0 => {
                return Err(FloquetError::Config("dimension must be positive".into()))
            }
            _ => {}
        }
        if segments.is_empty() {
            return Err(FloquetError::Config("profile has no segments".into()));
        }
        for (k, s) in segments.iter().enumerate() {
            if !s.field.is_finite() {
                return Err(FloquetError::Config(format!("segment {k}: field is not finite")));
            }
            if !(s.duration.is_finite() && s.duration > 0.0) {
                return Err(FloquetError::Config(format!(
                    "segment {k}: duration must be positive, got {}",
                    s.duration
                )));
            }
        }
        let total: f64 = segments.iter().map(|s| s.duration).sum();
        let mismatch = (total - period).abs();
        if mismatch > DURATION_SUM_RTOL * period {
            return Err(FloquetError::Config(format!(
                "segment durations sum to {total}, period is {period}"
            )));
        }
        if mismatch > 0.0 {
            let scale = period / total;
            for s in &mut segments {
                s.duration *= scale;
            }
        }

        let nu_scale = match mode {
            Mode::Magnetic => charge / (2.0 * mass),
            Mode::Oscillator => 1.0 / (2.0 * mass),
        };
        let nus: Vec<f64> = segments.iter().map(|s| s.field * nu_scale).collect();
        let mut starts = Vec::with_capacity(segments.len());
        let mut acc = 0.0;
        for s in &segments {
            starts.push(acc);
            acc += s.duration;
        }
        let omega_period = match mode {
            Mode::Magnetic => nus.iter().zip(&segments).map(|(nu, s)| nu * s.duration).sum(),
            Mode::Oscillator => 0.0,
        };

        Ok(Self {
            mass,
            charge,
            period,
            mode,
            dimension,
            segments,
            starts,
            nus,
            omega_period,
        })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn charge(&self) -> f64 {
        self.charge
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// `ν_k` for each segment.
    pub fn segment_nus(&self) -> &[f64] {
        &self.nus
    }

    /// Start time of each segment within one period.
    pub fn segment_starts(&self) -> &[f64] {
        &self.starts
    }

    /// Splits `t` into whole periods and a remainder in `[0, T)`.
    pub fn reduce(&self, t: f64) -> (i64, f64) {
        let mut n = (t / self.period).floor();
        let mut tau = t - n * self.period;
        if tau >= self.period {
            n += 1.0;
            tau -= self.period;
        }
        if tau < 0.0 {
            tau = 0.0;
        }
        (n as i64, tau)
    }

    fn segment_index(&self, tau: f64) -> usize {
        self.starts.partition_point(|&s| s <= tau).saturating_sub(1)
    }

    /// Hill frequency `ν(t)`, right-continuous and `T`-periodic.
    pub fn nu_at(&self, t: f64) -> f64 {
        let (_, tau) = self.reduce(t);
        self.nus[self.segment_index(tau)]
    }

    /// Rotation phase `Ω(t) = ∫₀ᵗ ν(s) ds`; identically zero in oscillator mode.
    pub fn omega_phase(&self, t: f64) -> f64 {
        if self.mode == Mode::Oscillator {
            return 0.0;
        }
        let (n, tau) = self.reduce(t);
        n as f64 * self.omega_period + self.pieces_until(tau).map(|(nu, dt)| nu * dt).sum::<f64>()
    }

    /// `Ω(T)`.
    pub fn omega_period(&self) -> f64 {
        self.omega_period
    }

    /// Constant-coefficient pieces `(ν_k, Δ)` covering `[0, tau]` for
    /// `tau ∈ [0, T]`; the final piece may be partial.
    pub fn pieces_until(&self, tau: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.starts
            .iter()
            .zip(&self.segments)
            .zip(&self.nus)
            .filter_map(move |((&start, seg), &nu)| {
                if start >= tau {
                    return None;
                }
                let dt = (tau - start).min(seg.duration);
                (dt > 0.0).then_some((nu, dt))
            })
    }

    /// Copy of this profile with one segment's field or duration replaced.
    /// Changing a duration changes the period accordingly.
    pub fn with_segment(&self, index: usize, segment: Segment) -> Result<Self> {
        if index >= self.segments.len() {
            return Err(FloquetError::Config(format!(
                "segment index {index} out of range ({} segments)",
                self.segments.len()
            )));
        }
        let mut segments = self.segments.clone();
        segments[index] = segment;
        let period = segments.iter().map(|s| s.duration).sum();
        Self::build(self.mass, self.charge, period, segments, self.mode, self.dimension)
    }
}

fn interpolate(samples: &[(f64, f64)], t: f64) -> f64 {
    let i = samples.partition_point(|&(s, _)| s <= t).clamp(1, samples.len() - 1);
    let (t0, v0) = samples[i - 1];
    let (t1, v1) = samples[i];
    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
}
