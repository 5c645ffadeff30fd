//! Internal averaging of weakly nonlinear hyperbolic systems.
//!
//! The crate builds and solves the averaged (slow-time) system for the
//! two-wave shallow-water family, solves the original ε-dependent systems
//! directly with a pseudo-spectral method, and decides resonance from the
//! frequency content of coefficients and initial data.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases below are the concrete types used by the harness.

pub mod averaged;
pub mod averaging;
pub mod direct;
pub mod error;
pub mod field;
pub mod grid;
pub mod oracles;
pub mod resonance;
pub mod scalar;
pub mod spectrum;
pub mod stencil;
mod transform;

pub use error::{Error, Result};
pub use field::{l2_norm, sup_norm, Field, FieldPair};
pub use grid::PeriodicGrid;
pub use scalar::Real;
pub use spectrum::{fourier_coeffs, inverse_fourier, Mode, Spectrum, TrigTerm};

pub type Grid64 = PeriodicGrid<f64>;
pub type Grid32 = PeriodicGrid<f32>;
pub type Field64 = Field<f64>;
pub type Field32 = Field<f32>;
pub type FieldPair64 = FieldPair<f64>;
pub type Spectrum64 = Spectrum<f64>;
pub type SystemSpec64 = resonance::SystemSpec<f64>;
pub type SchemeParams64 = averaged::SchemeParams<f64>;
pub type AveragedRun64 = averaged::AveragedRun<f64>;
pub type DirectState64 = direct::DirectState<f64>;

