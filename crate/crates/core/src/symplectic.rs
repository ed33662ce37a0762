//! Phase-space action of the rotation-invariant quadratic unitaries.
//!
//! Every unitary `U` built from `x²`, `p²`, `A = x·p + p·x` and `L` acts on
//! `(x, p) ∈ ℝ² × ℝ²` by conjugation `U*·(x, p)·U` as a 2×2 unit-determinant
//! "radial" matrix times a planar rotation `R̂(θ) = [[cos θ, sin θ], [−sin θ, cos θ]]`
//! applied to both `x` and `p`:
//!
//! ```text
//! x ↦ m11·R̂(θ)x + m12·R̂(θ)p
//! p ↦ m21·R̂(θ)x + m22·R̂(θ)p
//! ```
//!
//! For an operator product `U = U₁U₂…U_k` the map is `M₁M₂…M_k` (matrix
//! product in the same order) with the angles summed. Global phases of the
//! unitaries are not tracked.

use nalgebra::{Matrix2, Matrix4};
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{FloquetError, Result};
use crate::hill::FundamentalPair;

/// Below this `|λ|·t` the generator exponential uses its Taylor series.
const EXP_SERIES_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialSymplecticMap {
    pub radial: Matrix2<f64>,
    /// Unwrapped rotation angle.
    pub rot: f64,
}

/// The four primitive unitaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Primitive {
    /// `e^{−iαx²}`
    XSquared(f64),
    /// `e^{−iβp²}`
    PSquared(f64),
    /// `e^{−iγA}`
    Dilation(f64),
    /// `e^{iθL}`
    Rotation(f64),
}

pub fn primitive_map(kind: Primitive) -> RadialSymplecticMap {
    use Primitive::*;
    match kind {
        XSquared(alpha) => RadialSymplecticMap::radial(Matrix2::new(1.0, 0.0, -2.0 * alpha, 1.0)),
        PSquared(beta) => RadialSymplecticMap::radial(Matrix2::new(1.0, 2.0 * beta, 0.0, 1.0)),
        Dilation(gamma) => RadialSymplecticMap::radial(Matrix2::new(
            (2.0 * gamma).exp(),
            0.0,
            0.0,
            (-2.0 * gamma).exp(),
        )),
        Rotation(theta) => RadialSymplecticMap { radial: Matrix2::identity(), rot: theta },
    }
}

impl RadialSymplecticMap {
    pub fn identity() -> Self {
        Self { radial: Matrix2::identity(), rot: 0.0 }
    }

    pub fn new(radial: Matrix2<f64>, rot: f64) -> Self {
        Self { radial, rot }
    }

    fn radial(radial: Matrix2<f64>) -> Self {
        Self { radial, rot: 0.0 }
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.radial;
        m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
    }

    /// Map of the operator product `self_op · other_op`.
    pub fn then(&self, other: &RadialSymplecticMap) -> RadialSymplecticMap {
        RadialSymplecticMap { radial: self.radial * other.radial, rot: self.rot + other.rot }
    }

    /// Map of `U*`, the inverse conjugation.
    pub fn inverse(&self) -> RadialSymplecticMap {
        let m = &self.radial;
        let inv = Matrix2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]) / self.determinant();
        RadialSymplecticMap { radial: inv, rot: -self.rot }
    }

    /// The 4×4 matrix on `(x₁, x₂, p₁, p₂)`.
    pub fn phase_space_matrix(&self) -> Matrix4<f64> {
        let (s, c) = self.rot.sin_cos();
        let r = Matrix2::new(c, s, -s, c);
        let mut out = Matrix4::zeros();
        for (bi, bj) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let block = r * self.radial[(bi, bj)];
            out.fixed_view_mut::<2, 2>(2 * bi, 2 * bj).copy_from(&block);
        }
        out
    }

    /// Largest entrywise difference of the 4×4 expansions; rotation angles
    /// differing by multiples of 2π compare equal.
    pub fn max_abs_diff(&self, other: &RadialSymplecticMap) -> f64 {
        (self.phase_space_matrix() - other.phase_space_matrix()).amax()
    }

    /// Entrywise max |·| of the radial block.
    pub fn radial_norm(&self) -> f64 {
        self.radial.amax()
    }
}

impl Serialize for RadialSymplecticMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let m = &self.radial;
        let mut st = serializer.serialize_struct("RadialSymplecticMap", 2)?;
        st.serialize_field("radial", &[[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]])?;
        st.serialize_field("rot", &self.rot)?;
        st.end()
    }
}

/// Composes maps listed in operator-product order.
pub fn compose(factors: &[RadialSymplecticMap]) -> RadialSymplecticMap {
    factors.iter().fold(RadialSymplecticMap::identity(), |acc, f| acc.then(f))
}

/// Map of `U = e^{−it(αx² + βp² + γA)}` followed by a rotation at angular
/// rate `rot_rate` (generator `−rot_rate·L`, which commutes with the rest).
///
/// The radial block is `exp(t·[[2γ, 2β], [−2α, −2γ]])`, evaluated in closed
/// form from the eigenvalues `±√(4γ² − 4αβ)`.
pub fn exp_quadratic(alpha: f64, beta: f64, gamma: f64, rot_rate: f64, t: f64) -> RadialSymplecticMap {
    let g = Matrix2::new(2.0 * gamma, 2.0 * beta, -2.0 * alpha, -2.0 * gamma);
    let kappa = 4.0 * gamma * gamma - 4.0 * alpha * beta;
    let s = kappa * t * t;
    let (c, sh) = if s.abs() < EXP_SERIES_THRESHOLD * EXP_SERIES_THRESHOLD {
        (1.0 + s / 2.0 + s * s / 24.0, t * (1.0 + s / 6.0 + s * s / 120.0))
    } else if kappa > 0.0 {
        let r = kappa.sqrt();
        ((r * t).cosh(), (r * t).sinh() / r)
    } else {
        let r = (-kappa).sqrt();
        ((r * t).cos(), (r * t).sin() / r)
    };
    RadialSymplecticMap { radial: Matrix2::identity() * c + g * sh, rot: rot_rate * t }
}

/// Map of `e^{−ia x²} e^{−ib p²} e^{iωL} e^{−ic x²}`.
pub fn factorization_map(a: f64, b: f64, c: f64, omega: f64) -> RadialSymplecticMap {
    compose(&[
        primitive_map(Primitive::XSquared(a)),
        primitive_map(Primitive::PSquared(b)),
        primitive_map(Primitive::Rotation(omega)),
        primitive_map(Primitive::XSquared(c)),
    ])
}

/// `[[ζ₁, ζ₂/m], [mζ₁', ζ₂']]` with rotation `omega`.
pub fn transfer_to_map(pair: &FundamentalPair, mass: f64, omega: f64) -> RadialSymplecticMap {
    RadialSymplecticMap {
        radial: Matrix2::new(pair.zeta1, pair.zeta2 / mass, mass * pair.dzeta1, pair.dzeta2),
        rot: omega,
    }
}

/// Coefficients `a(t), b(t), c(t)` of the four-factor propagator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factorization {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Factorization {
    /// Requires `ζ₂(t) ≠ 0`.
    pub fn from_pair(pair: &FundamentalPair, mass: f64) -> Result<Self> {
        if pair.zeta2 == 0.0 || !pair.zeta2.is_finite() {
            return Err(FloquetError::AssumptionViolation(format!(
                "factorization needs ζ₂(t) ≠ 0, got {} at t = {}",
                pair.zeta2, pair.t
            )));
        }
        Ok(Self {
            a: mass / 2.0 * (1.0 - pair.dzeta2) / pair.zeta2,
            b: pair.zeta2 / (2.0 * mass),
            c: mass / 2.0 * (1.0 - pair.zeta1) / pair.zeta2,
        })
    }
}

/// `Mᵀ J M = J` on `(x₁, x₂, p₁, p₂)` with `J = [[0, I], [−I, 0]]`, entrywise within `tol`.
pub fn is_symplectic(m: &Matrix4<f64>, tol: f64) -> bool {
    let j = symplectic_form();
    (m.transpose() * j * m - j).amax() <= tol
}

pub fn symplectic_form() -> Matrix4<f64> {
    let mut j = Matrix4::zeros();
    j[(0, 2)] = 1.0;
    j[(1, 3)] = 1.0;
    j[(2, 0)] = -1.0;
    j[(3, 1)] = -1.0;
    j
}
