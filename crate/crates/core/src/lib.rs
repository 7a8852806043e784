//! Quantum and Planck-scale noise budgets for interferometric position
//! measurement.
//!
//! Most types are generic over the scalar; the aliases below fix `f64`
//! (needed for SI values at the Planck scale) or `f32` (fine with unit
//! constants). Synthesis and the Monte-Carlo estimator are `f64` only.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod constants;
pub mod error;
pub mod gravity;
pub mod grid;
pub mod measurement;
pub mod mirror;
pub mod response;
pub mod scalar;
pub mod spectrum;
pub mod synth;

pub use constants::{compton_wavelength, PhysicalConstants};
pub use error::{Error, Result};
pub use grid::FrequencyGrid;
pub use mirror::{Damping, MirrorParams};
pub use response::{ComplexResponse, FdtOptions, FdtReport};
pub use scalar::Scalar;
pub use spectrum::{symmetrize, Sidedness, Spectrum};

pub type Constants64 = PhysicalConstants<f64>;
pub type Constants32 = PhysicalConstants<f32>;
pub type Grid64 = FrequencyGrid<f64>;
pub type Grid32 = FrequencyGrid<f32>;
pub type Spectrum64 = Spectrum<f64>;
pub type Spectrum32 = Spectrum<f32>;
pub type Response64 = ComplexResponse<f64>;
pub type Response32 = ComplexResponse<f32>;
pub type Mirror64 = MirrorParams<f64>;
pub type Mirror32 = MirrorParams<f32>;
pub type Quadratures64 = measurement::Quadratures<f64>;
pub type Strategy64 = measurement::Strategy<f64>;
pub type Curvature64 = gravity::CurvatureSpectrum<f64>;
