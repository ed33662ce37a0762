//! Floquet analysis of Hill's equation for charged particles in time-periodic
//! magnetic fields and for time-periodic harmonic oscillators.

pub mod checks;
pub mod dynamics;
pub mod error;
pub mod floquet;
pub mod hill;
pub mod mourre;
pub mod ode;
pub mod profiles;
pub mod pulses;
pub mod symplectic;

pub use error::{FloquetError, Result};
pub use floquet::{MonodromyData, NormalForm, Stability};
pub use hill::{FundamentalPair, Method, TransferMatrix};
pub use profiles::{FieldProfile, Mode, Segment};
pub use symplectic::{Primitive, RadialSymplecticMap};
