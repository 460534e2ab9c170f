//! Shared numerical kernels: adaptive quadrature, principal-value
//! integrals, cubic root solving, Bessel J₁, a reproducible Gaussian
//! stream, dense eigensolvers, and fixed-step linear ODE integration.

mod bessel;
mod eig;
mod ode;
mod osc;
mod pv;
mod quad;
mod rng;
mod roots;

pub use bessel::bessel_j1;
pub use eig::{
    general_eigenvalues, general_eigenvalues_complex, symmetric_eig, SymmetricEig,
    GENERAL_EIG_MAX_DIM,
};
pub use ode::linear_ode_rk4;
pub use osc::{osc_tail_cos, osc_tail_sin, OSC_TAIL_MIN_Z};
pub use pv::{pv_integral, pv_integral_real_line};
pub use quad::{integrate, integrate_to_infinity, integrate_with_abs, QuadResult};
pub use rng::GaussianStream;
pub use roots::{cubic_roots, CubicRoots};

use thiserror::Error;

/// Errors produced by the numerical kernels.
#[derive(Debug, Error)]
pub enum NumericsError {
    #[error(
        "quadrature did not reach the requested tolerance: \
         achieved {achieved:.3e}, requested {requested:.3e}, {panels} panels on [{a}, {b}]"
    )]
    QuadratureNonConvergence {
        achieved: f64,
        requested: f64,
        panels: usize,
        a: f64,
        b: f64,
    },
    #[error("integrand evaluated to a non-finite value at x = {x}")]
    NonFiniteEvaluation { x: f64 },
    #[error("invalid integration interval [{a}, {b}]")]
    BadInterval { a: f64, b: f64 },
    #[error("principal-value pole at {pole} lies outside or on the boundary of [{a}, {b}]")]
    PoleOutsideInterval { pole: f64, a: f64, b: f64 },
    #[error("principal-value poles at {p0} and {p1} are too close to separate (window {window:.3e})")]
    PolesTooClose { p0: f64, p1: f64, window: f64 },
    #[error(
        "principal-value extrapolation stalled at error {achieved:.3e} (target {requested:.3e})"
    )]
    PrincipalValueNonConvergence { achieved: f64, requested: f64 },
    #[error("eigensolver failed to converge for a {dim}x{dim} matrix")]
    EigFailure { dim: usize },
    #[error("matrix dimension {dim} exceeds the general eigensolver cap of {max}")]
    MatrixTooLarge { dim: usize, max: usize },
    #[error("eigendecomposition residual {residual:.3e} exceeds the contract bound {bound:.3e}")]
    EigResidual { residual: f64, bound: f64 },
    #[error("ODE step {step:.3e} exceeds the stability bound {bound:.3e} for spectral radius estimate {radius:.3e}")]
    StepTooLarge { step: f64, bound: f64, radius: f64 },
    #[error("time grid must be nonnegative and strictly ascending")]
    BadTimeGrid,
}
