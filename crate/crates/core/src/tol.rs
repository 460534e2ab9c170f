//! Central numeric tolerance constants.
//!
//! Every module pulls its defaults from here so that the accuracy
//! contract of the crate is documented in one place.

/// Default relative tolerance for adaptive quadrature.
pub const QUAD_REL: f64 = 1e-10;

/// Absolute floor below which quadrature results are considered zero.
pub const QUAD_ABS_FLOOR: f64 = 1e-300;

/// Target relative error for principal-value integrals.
pub const PV_REL: f64 = 1e-9;

/// Relative residual allowed on cubic-root reconstruction.
pub const CUBIC_RESIDUAL: f64 = 1e-10;

/// Relative accuracy of the Bessel J₁ evaluation.
pub const BESSEL_REL: f64 = 1e-10;

/// Band (relative to the larger of the squared frequency scales) within
/// which a squared shifted frequency counts as critically damped.
pub const CRITICAL_BAND: f64 = 1e-9;

/// Residual allowed when verifying eigendecompositions A·V − V·Λ.
pub const EIG_RESIDUAL: f64 = 1e-9;

/// Relative tolerance used when comparing two independent computations
/// of the same closed-form quantity.
pub const CROSS_CHECK_REL: f64 = 1e-12;
