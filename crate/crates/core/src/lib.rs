//! Redfield relaxation rates and overdamping transitions for four open
//! quantum systems: a damped two-level system coupled to an oscillator
//! bath, a spin coupled to a random-matrix bath, a dephasing ring, and
//! quantum Brownian motion.
//!
//! The central quantity everywhere is the pair (Γ, Ω²): a damping rate
//! and a shifted squared frequency computed to second order in the
//! system–bath coupling. Relaxation is oscillatory while Ω² > 0 and
//! monotone once Ω² < 0; the crate locates the transition couplings and
//! validates the perturbative rates against exact dynamics (full
//! diagonalization for the random-matrix bath, a discretized-bath ODE
//! integration for Brownian motion).
//!
//! Modules:
//! - [`numerics`]: quadrature, principal-value integrals, cubic roots,
//!   Bessel J₁, a reproducible Gaussian stream, eigensolvers, RK4.
//! - [`bath`]: Drude oscillator-bath correlators and spectral functions.
//! - [`spin`]: generic two-level Redfield rates, Bloch trajectories,
//!   mode decomposition, and the high-temperature spin-boson forms.
//! - [`gorm`]: the random-matrix bath (GOE sampling, semicircle spectral
//!   function, exact shell-averaged dynamics).
//! - [`ring`]: the dephasing ring and its diffusive relaxation branch.
//! - [`qbm`]: quantum Brownian motion exact and perturbative rates.
//! - [`io`]: CSV/JSON emission with provenance headers.

pub mod bath;
pub mod gorm;
pub mod io;
pub mod numerics;
pub mod qbm;
pub mod ring;
pub mod spin;
pub mod tol;
