use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FloquetError {
    /// The profile description is malformed or violates a physical constraint.
    #[error("config error: {0}")]
    Config(String),

    /// The adaptive integrator could not make progress.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("discriminant {0} is not hyperbolic (|D| < 2)")]
    NotHyperbolic(f64),

    /// D² ≤ 4, ζ₂(T) ≈ 0, or another precondition of the hyperbolic normal form failed.
    #[error("assumption violated: {0}")]
    AssumptionViolation(String),

    #[error("angle jump of {jump} rad between samples {index} and {} is too large to unwrap", .index + 1)]
    Unwrap { index: usize, jump: f64 },
}

pub type Result<T> = std::result::Result<T, FloquetError>;
