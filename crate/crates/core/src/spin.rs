//! Two-level Redfield dynamics: relaxation and precession rates from a
//! bath spectral profile, finite-horizon rate buildup, closed-form Bloch
//! trajectories, the four-mode decomposition, and the overdamping
//! threshold of the high-temperature spin-boson model.
//!
//! The transverse Bloch components obey ẋ = −ω₀y and
//! ẏ = ((Ω²+Γ²)/ω₀)x − 2Γy, the inversion ż = 2Γ(z_∞ − z). Overdamping
//! means Ω² < 0: the transverse pair then relaxes through two real
//! exponentials instead of a damped oscillation, and the slower of the
//! two decays more slowly the stronger the coupling.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

use crate::bath::{BathSpec, CorrelatorValue, CouplingUnit, ThermalState};
use crate::numerics::{integrate, pv_integral_real_line, NumericsError};
use crate::tol;

/// Half-width of the explicit principal-value region, in units of the
/// bare frequency; the pole-free remainder of the real line is handled
/// by mapped quadrature.
const PV_HALF_WIDTH_FACTOR: f64 = 25.0;

/// Relative tolerance for the finite-horizon rate quadratures. Kept two
/// orders above the bath correlator's own quadrature tolerance so inner
/// evaluation noise cannot stall the outer refinement.
const FINITE_RATE_REL: f64 = 1e-8;

/// βħω₀ at or above this value means the closed high-temperature forms
/// are extrapolated outside their derivation regime.
pub const HIGH_T_ADVISORY: f64 = 0.1;

#[derive(Debug, Error)]
pub enum SpinError {
    #[error("bare frequency must be positive and finite")]
    InvalidFrequency,
    #[error("hbar must be positive and finite")]
    InvalidHbar,
    #[error("spin and bath disagree on hbar")]
    MismatchedHbar,
    #[error("bath spectral weight at the Bohr frequency sums to zero; stationary inversion undefined")]
    DegenerateBath,
    #[error("time must be nonnegative and finite")]
    InvalidTime,
    #[error("time grid must be finite, nonnegative, and ascending")]
    InvalidTimeGrid,
    #[error("damping rate must be nonnegative and finite")]
    InvalidRates,
    #[error("damping is positive but no stationary inversion was supplied")]
    MissingStationaryInversion,
    #[error("closed high-temperature forms require a finite temperature")]
    RequiresFiniteTemperature,
    #[error("coupling must carry action units for the spin-boson bath")]
    WrongCouplingUnit,
    #[error("coupling {kappa} is below the critical value {critical}; the overdamped mode forms do not apply")]
    BelowCritical { kappa: f64, critical: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Bare two-level system with level splitting ħω₀.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SpinModel {
    omega0: f64,
    hbar: f64,
}

impl SpinModel {
    pub fn new(omega0: f64, hbar: f64) -> Result<Self, SpinError> {
        if !(omega0 > 0.0) || !omega0.is_finite() {
            return Err(SpinError::InvalidFrequency);
        }
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(SpinError::InvalidHbar);
        }
        Ok(Self { omega0, hbar })
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }
}

/// Expectation values of the three Pauli operators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// Markovian damping rate Γ, squared shifted frequency Ω² (negative in
/// the overdamped regime), and stationary inversion. `z_inf` is `None`
/// when Γ = 0: an uncoupled spin never relaxes, so no stationary value
/// is selected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkovRates {
    pub gamma: f64,
    pub omega2: f64,
    pub z_inf: Option<f64>,
}

/// Rates accumulated up to a finite horizon. The third entry is the
/// product Γ(t)·z_∞(t), the combination the inversion equation uses
/// directly; it stays finite even while Γ(t) passes through zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteTimeRates {
    pub gamma: f64,
    pub omega2: f64,
    pub gamma_z_inf: f64,
}

/// The four relaxation rates of the Bloch equations: s₁ = 0 carries the
/// stationary state, s₂ = −2Γ the inversion, s₃ and s₄ the transverse
/// pair (complex conjugates under normal damping, both real under
/// overdamping).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSet {
    pub s1: Complex64,
    pub s2: Complex64,
    pub s3: Complex64,
    pub s4: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DampingRegime {
    Normal,
    Critical,
    Overdamped,
}

/// Markovian rates from the bath correlation-function transform α̃.
///
/// Γ and z_∞ come from α̃ at the two Bohr frequencies; the frequency
/// shift needs the principal value of ∫ α̃(ω)/(ω₀²−ω²) dω over the whole
/// real line.
pub fn markov_rates(
    spin: &SpinModel,
    mut bath_ft: impl FnMut(f64) -> f64,
) -> Result<MarkovRates, SpinError> {
    let w0 = spin.omega0;
    let h2 = spin.hbar * spin.hbar;
    let a_plus = bath_ft(w0);
    let a_minus = bath_ft(-w0);
    let weight = a_plus + a_minus;
    if weight == 0.0 {
        return Err(SpinError::DegenerateBath);
    }
    let gamma = PI / h2 * weight;
    let z_inf = (a_minus - a_plus) / weight;
    let pv = pv_integral_real_line(
        |w| bath_ft(w) / ((w0 - w) * (w0 + w)),
        &[-w0, w0],
        PV_HALF_WIDTH_FACTOR * w0,
        tol::PV_REL,
    )?;
    let omega2 = w0 * w0 + 4.0 * w0 * w0 / h2 * pv - gamma * gamma;
    Ok(MarkovRates {
        gamma,
        omega2,
        z_inf: Some(z_inf),
    })
}

/// Rates accumulated up to horizon t from the time-domain correlator
/// α(τ) = C(τ) + iD(τ). Converges to [`markov_rates`] as t → ∞.
pub fn rates_time_dependent(
    spin: &SpinModel,
    mut correlator: impl FnMut(f64) -> CorrelatorValue,
    t: f64,
) -> Result<FiniteTimeRates, SpinError> {
    if !t.is_finite() || t < 0.0 {
        return Err(SpinError::InvalidTime);
    }
    let w0 = spin.omega0;
    let h2 = spin.hbar * spin.hbar;
    if t == 0.0 {
        return Ok(FiniteTimeRates {
            gamma: 0.0,
            omega2: w0 * w0,
            gamma_z_inf: 0.0,
        });
    }
    let cos_c = integrate(
        |tau| (w0 * tau).cos() * correlator(tau).c,
        0.0,
        t,
        FINITE_RATE_REL,
    )?
    .value;
    let sin_c = integrate(
        |tau| (w0 * tau).sin() * correlator(tau).c,
        0.0,
        t,
        FINITE_RATE_REL,
    )?
    .value;
    let sin_d = integrate(
        |tau| (w0 * tau).sin() * correlator(tau).d,
        0.0,
        t,
        FINITE_RATE_REL,
    )?
    .value;
    let gamma = 2.0 / h2 * cos_c;
    Ok(FiniteTimeRates {
        gamma,
        omega2: w0 * w0 + 4.0 * w0 / h2 * sin_c - gamma * gamma,
        gamma_z_inf: 2.0 / h2 * sin_d,
    })
}

/// cos(Ωt) and sin(Ωt)/Ω, analytically continued to cosh and sinh/|Ω|
/// for Ω² < 0. The shared series in ξ = Ω²t² covers the neighborhood of
/// Ω² = 0, where the pair degenerates to (1, t).
fn sc_kernels(omega2: f64, t: f64) -> (f64, f64) {
    let xi = omega2 * t * t;
    if xi.abs() < 1e-4 {
        let c = 1.0 - xi / 2.0 + xi * xi / 24.0 - xi * xi * xi / 720.0;
        let s = t * (1.0 - xi / 6.0 + xi * xi / 120.0 - xi * xi * xi / 5040.0);
        (c, s)
    } else if omega2 > 0.0 {
        let w = omega2.sqrt();
        ((w * t).cos(), (w * t).sin() / w)
    } else {
        let w = (-omega2).sqrt();
        ((w * t).cosh(), (w * t).sinh() / w)
    }
}

/// Closed-form Bloch trajectory at the given times. Each point is an
/// independent evaluation with no accumulation across the grid, so the
/// map may be parallelized per time with bitwise-identical results.
pub fn evolve(
    rates: &MarkovRates,
    spin: &SpinModel,
    b0: BlochVector,
    times: &[f64],
) -> Result<Vec<BlochVector>, SpinError> {
    if !rates.gamma.is_finite() || rates.gamma < 0.0 || !rates.omega2.is_finite() {
        return Err(SpinError::InvalidRates);
    }
    if rates.gamma > 0.0 && rates.z_inf.is_none() {
        return Err(SpinError::MissingStationaryInversion);
    }
    for pair in times.windows(2) {
        if pair[1] < pair[0] {
            return Err(SpinError::InvalidTimeGrid);
        }
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(SpinError::InvalidTimeGrid);
    }
    let w0 = spin.omega0;
    let g = rates.gamma;
    let q2 = rates.omega2 + g * g;
    let zi = rates.z_inf.unwrap_or(b0.z);
    Ok(times
        .iter()
        .map(|&t| {
            let decay = (-g * t).exp();
            let (ck, sk) = sc_kernels(rates.omega2, t);
            BlochVector {
                x: decay * (b0.x * (ck + g * sk) - w0 * b0.y * sk),
                y: decay * (b0.x * (q2 / w0) * sk + b0.y * (ck - g * sk)),
                z: zi + (b0.z - zi) * (-2.0 * g * t).exp(),
            }
        })
        .collect())
}

/// The four relaxation rates for the given Markovian rates.
pub fn modes(rates: &MarkovRates) -> ModeSet {
    let g = rates.gamma;
    let (s3, s4) = if rates.omega2 > 0.0 {
        let w = rates.omega2.sqrt();
        (Complex64::new(-g, w), Complex64::new(-g, -w))
    } else {
        let w = (-rates.omega2).sqrt();
        (Complex64::new(-g + w, 0.0), Complex64::new(-g - w, 0.0))
    };
    ModeSet {
        s1: Complex64::new(0.0, 0.0),
        s2: Complex64::new(-2.0 * g, 0.0),
        s3,
        s4,
    }
}

/// Damping regime of the transverse pair. The band is relative to
/// max(Ω²+Γ², Γ²); Ω²+Γ² equals the squared bare frequency up to the
/// environmental shift, so this reproduces the max(ω₀², Γ²) scale
/// without needing the model.
pub fn classify(rates: &MarkovRates, tol_band: f64) -> DampingRegime {
    assert!(
        tol_band > 0.0 && tol_band.is_finite(),
        "classification tolerance must be positive"
    );
    let q2 = rates.omega2 + rates.gamma * rates.gamma;
    let scale = q2.abs().max(rates.gamma * rates.gamma);
    if rates.omega2 > tol_band * scale {
        DampingRegime::Normal
    } else if rates.omega2 < -tol_band * scale {
        DampingRegime::Overdamped
    } else {
        DampingRegime::Critical
    }
}

/// Markovian rates together with the validity parameter βħω₀ of the
/// high-temperature closed forms (see [`HIGH_T_ADVISORY`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HighTRates {
    pub rates: MarkovRates,
    pub high_t_parameter: f64,
}

/// Closed high-temperature rates for the exponential-cutoff oscillator
/// bath: Γ = 2κα²/(βħ²(α²+ω₀²)), the shift 4καω₀²/(βħ²(α²+ω₀²)), and
/// Γ·z_∞ = −κα²ω₀/(ħ(α²+ω₀²)).
pub fn spin_boson_high_t(
    spin: &SpinModel,
    bath: &BathSpec,
    temp: &ThermalState,
) -> Result<HighTRates, SpinError> {
    if bath.unit() != CouplingUnit::Action {
        return Err(SpinError::WrongCouplingUnit);
    }
    if (bath.hbar() - spin.hbar).abs() > 1e-12 * spin.hbar {
        return Err(SpinError::MismatchedHbar);
    }
    let beta = temp.beta().ok_or(SpinError::RequiresFiniteTemperature)?;
    let w0 = spin.omega0;
    let h = spin.hbar;
    let kappa = bath.kappa();
    let a2 = bath.alpha() * bath.alpha();
    let denom = a2 + w0 * w0;
    let gamma = 2.0 * kappa * a2 / (beta * h * h * denom);
    let shift = 4.0 * kappa * bath.alpha() * w0 * w0 / (beta * h * h * denom);
    // Γ·z_∞ / Γ simplifies to −βħω₀/2, the small-βħω₀ truncation of
    // −tanh(βħω₀/2); evaluated directly to avoid the quotient.
    let z_inf = if kappa > 0.0 {
        Some(-0.5 * beta * h * w0)
    } else {
        None
    };
    Ok(HighTRates {
        rates: MarkovRates {
            gamma,
            omega2: w0 * w0 + shift - gamma * gamma,
            z_inf,
        },
        high_t_parameter: beta * h * w0,
    })
}

/// Critical coupling ħ²βω₀/2 above which the high-temperature spin-boson
/// model is overdamped.
pub fn spin_boson_kappa_c(spin: &SpinModel, temp: &ThermalState) -> Result<f64, SpinError> {
    let beta = temp.beta().ok_or(SpinError::RequiresFiniteTemperature)?;
    Ok(0.5 * spin.hbar * spin.hbar * beta * spin.omega0)
}

/// Relaxation rates in the overdamped high-temperature regime, in the
/// ω₀ ≪ α limit: s₂ = −4κ/(ħ²β) and
/// s₃,₄ = −(2κ/(ħ²β))(1 ∓ √(1−(κ_c/κ)²)). Couplings below κ_c belong to
/// the generic [`modes`] path.
pub fn high_t_modes(
    kappa: f64,
    spin: &SpinModel,
    temp: &ThermalState,
) -> Result<ModeSet, SpinError> {
    let beta = temp.beta().ok_or(SpinError::RequiresFiniteTemperature)?;
    let critical = spin_boson_kappa_c(spin, temp)?;
    if !(kappa >= critical) {
        return Err(SpinError::BelowCritical { kappa, critical });
    }
    let r0 = 2.0 * kappa / (spin.hbar * spin.hbar * beta);
    let ratio = critical / kappa;
    let root = (1.0 - ratio * ratio).max(0.0).sqrt();
    Ok(ModeSet {
        s1: Complex64::new(0.0, 0.0),
        s2: Complex64::new(-2.0 * r0, 0.0),
        s3: Complex64::new(-r0 * (1.0 - root), 0.0),
        s4: Complex64::new(-r0 * (1.0 + root), 0.0),
    })
}
