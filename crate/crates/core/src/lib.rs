//! Numerical toolkit for the family of measures on `S^n` with density
//! proportional to `|y - x|^{-(n+α)}`, `|x| < 1`: angular marginals,
//! curvature-dimension certificates, model isoperimetric profiles, spectral
//! gaps and seeded sampling.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix `f64`. Sampling is `f64` only.

// Validation is written as `!(x >= lo)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curvature;
pub mod error;
pub mod measures;
pub mod profiles;
pub mod quadrature;
pub mod sampling;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Params = measures::SphereParams<f64>;
pub type Marginal = measures::MarginalDensity<f64>;
pub type Profile = profiles::ModelProfile<f64>;
pub type Certificate = curvature::CdCertificate<f64>;
pub type Spectrum = spectral::SpectralResult<f64>;

pub type ParamsF32 = measures::SphereParams<f32>;
pub type MarginalF32 = measures::MarginalDensity<f32>;
pub type ProfileF32 = profiles::ModelProfile<f32>;
