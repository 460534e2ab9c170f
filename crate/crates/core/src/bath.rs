//! Equilibrium autocorrelators, spectral strengths, and Fourier
//! transforms for a harmonic-oscillator environment with the
//! Ullersma/Drude spectral strength γ(ω) = (2/π)κα²ω²/(α²+ω²).
//!
//! The correlator α(t) = C(t) + iD(t) splits into a temperature-
//! dependent real part and an exactly temperature-independent imaginary
//! part D(t) = −(ħκα²/2)e^{−α|t|}sgn(t). The real part is evaluated by
//! the residue series over the cutoff pole and the thermal poles of
//! coth, which converges exponentially for t beyond half a thermal
//! time, by windowed quadrature with analytic tail corrections below
//! that, and through exponential integrals at zero temperature. C(t)
//! diverges logarithmically as t → 0; requesting t = 0 is an error.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{integrate, osc_tail_cos, NumericsError, OSC_TAIL_MIN_Z};

/// Dimension carried by the coupling strength κ. Spin-bath models take
/// κ with the dimension of an action; the Brownian-motion model takes a
/// frequency. Model constructors reject a bath tagged for the other
/// family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CouplingUnit {
    Action,
    Frequency,
}

/// Ullersma/Drude environment parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BathSpec {
    kappa: f64,
    alpha: f64,
    hbar: f64,
    unit: CouplingUnit,
}

/// Inverse temperature, with zero temperature (β = ∞) as a
/// distinguished state rather than a sentinel float.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ThermalState {
    Finite { beta: f64 },
    ZeroTemperature,
}

/// One evaluation of the bath correlator α(t) = C(t) + iD(t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatorValue {
    /// Real part C(t), even in t.
    pub c: f64,
    /// Imaginary part D(t), odd in t.
    pub d: f64,
}

#[derive(Debug, Error)]
pub enum BathError {
    #[error("coupling strength must be nonnegative and finite, got {kappa}")]
    InvalidCoupling { kappa: f64 },
    #[error("bath cutoff must be positive and finite, got {alpha}")]
    InvalidCutoff { alpha: f64 },
    #[error("hbar must be positive and finite, got {hbar}")]
    InvalidHbar { hbar: f64 },
    #[error("inverse temperature must be positive and finite, got {beta}; use ThermalState::ZeroTemperature for beta = infinity")]
    InvalidBeta { beta: f64 },
    #[error("spectral strength is defined for omega >= 0, got {omega}")]
    NegativeFrequency { omega: f64 },
    #[error("spectral density J is defined for omega > 0, got {omega}")]
    NonPositiveFrequency { omega: f64 },
    #[error("the Fourier transform at omega = 0 is a removable limit; use correlator_ft_zero_limit")]
    ZeroFrequency,
    #[error("C(t) diverges logarithmically as t -> 0 for the Drude cutoff; evaluate at t != 0")]
    UltravioletDivergence,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

impl BathSpec {
    pub fn new(kappa: f64, alpha: f64, hbar: f64, unit: CouplingUnit) -> Result<Self, BathError> {
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(BathError::InvalidCoupling { kappa });
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(BathError::InvalidCutoff { alpha });
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(BathError::InvalidHbar { hbar });
        }
        Ok(Self {
            kappa,
            alpha,
            hbar,
            unit,
        })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn unit(&self) -> CouplingUnit {
        self.unit
    }
}

impl ThermalState {
    pub fn finite(beta: f64) -> Result<Self, BathError> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(BathError::InvalidBeta { beta });
        }
        Ok(Self::Finite { beta })
    }

    pub fn zero_temperature() -> Self {
        Self::ZeroTemperature
    }

    /// β for a finite-temperature state, `None` at zero temperature.
    pub fn beta(&self) -> Option<f64> {
        match self {
            Self::Finite { beta } => Some(*beta),
            Self::ZeroTemperature => None,
        }
    }
}

/// Spectral strength γ(ω) = (2/π)κα²ω²/(α²+ω²) for ω ≥ 0.
pub fn spectral_gamma(spec: &BathSpec, omega: f64) -> Result<f64, BathError> {
    if !(omega >= 0.0) {
        return Err(BathError::NegativeFrequency { omega });
    }
    let a2 = spec.alpha * spec.alpha;
    Ok((2.0 / std::f64::consts::PI) * spec.kappa * a2 * omega * omega / (a2 + omega * omega))
}

/// Spectral density J(ω) = γ(ω)/(2ω) for ω > 0.
pub fn spectral_j(spec: &BathSpec, omega: f64) -> Result<f64, BathError> {
    if !(omega > 0.0) {
        return Err(BathError::NonPositiveFrequency { omega });
    }
    Ok(spectral_gamma(spec, omega)? / (2.0 * omega))
}

/// Thermal energy of an oscillation, E_β(ω) = (ħω/2)coth(βħω/2); even
/// in ω, with the equipartition limit 1/β at ω = 0 and the zero-point
/// energy ħ|ω|/2 at zero temperature.
pub fn thermal_energy(temp: &ThermalState, omega: f64, hbar: f64) -> f64 {
    match temp {
        ThermalState::Finite { beta } => {
            if omega == 0.0 {
                1.0 / beta
            } else {
                0.5 * hbar * omega * coth(0.5 * beta * hbar * omega)
            }
        }
        ThermalState::ZeroTemperature => 0.5 * hbar * omega.abs(),
    }
}

/// Fourier transform α̃(ω) = γ(|ω|)·ħ/(4ω)·(coth(βħω/2) + 1) of the
/// correlator, for ω ≠ 0. Nonnegative everywhere; vanishes for ω < 0 at
/// zero temperature.
pub fn correlator_ft(spec: &BathSpec, temp: &ThermalState, omega: f64) -> Result<f64, BathError> {
    if omega == 0.0 {
        return Err(BathError::ZeroFrequency);
    }
    let g = spectral_gamma(spec, omega.abs())?;
    let prefactor = g * spec.hbar / (4.0 * omega);
    Ok(match temp {
        // coth(x) + 1 = -2/expm1(-2x), stable for both signs and free
        // of overflow at extreme beta.
        ThermalState::Finite { beta } => {
            prefactor * (-2.0 / f64::exp_m1(-beta * spec.hbar * omega))
        }
        ThermalState::ZeroTemperature => {
            if omega > 0.0 {
                2.0 * prefactor
            } else {
                0.0
            }
        }
    })
}

/// ω → 0 limit of [`correlator_ft`]: κ/(πβ) at finite temperature,
/// zero at zero temperature.
pub fn correlator_ft_zero_limit(spec: &BathSpec, temp: &ThermalState) -> f64 {
    match temp {
        ThermalState::Finite { beta } => spec.kappa / (std::f64::consts::PI * beta),
        ThermalState::ZeroTemperature => 0.0,
    }
}

/// α̃ as a plain frequency function with the removable point at ω = 0
/// patched by its limit, for quadrature and principal-value drivers
/// that sample arbitrary frequencies.
pub fn correlator_ft_fn<'a>(
    spec: &'a BathSpec,
    temp: &'a ThermalState,
) -> impl Fn(f64) -> f64 + 'a {
    move |omega| {
        if omega == 0.0 {
            correlator_ft_zero_limit(spec, temp)
        } else {
            correlator_ft(spec, temp, omega).expect("nonzero frequency")
        }
    }
}

/// Bath correlator α(t) = C(t) + iD(t) at time t ≠ 0.
pub fn correlator(
    spec: &BathSpec,
    temp: &ThermalState,
    t: f64,
) -> Result<CorrelatorValue, BathError> {
    if t == 0.0 {
        return Err(BathError::UltravioletDivergence);
    }
    let at = spec.alpha * t.abs();
    let d = -0.5 * spec.hbar * spec.kappa * spec.alpha * spec.alpha * (-at).exp() * t.signum();
    let c = match temp {
        ThermalState::Finite { beta } => {
            if t.abs() <= 0.5 * beta * spec.hbar {
                quadrature_c(spec, *beta, t.abs())?
            } else {
                matsubara_c(spec, *beta, t.abs())
            }
        }
        ThermalState::ZeroTemperature => zero_temperature_c(spec, t.abs()),
    };
    Ok(CorrelatorValue { c, d })
}

/// coth(x) = 1 + 2/expm1(2x); stable for both signs, saturating to ±1
/// when the exponential overflows.
fn coth(x: f64) -> f64 {
    let e = f64::exp_m1(2.0 * x);
    if e.is_infinite() {
        1.0
    } else {
        1.0 + 2.0 / e
    }
}

/// b(x) = coth(x) − 1/x on x > 0, the quantum excess over
/// equipartition; increases from 0 to 1.
fn coth_excess(x: f64) -> f64 {
    if x < 0.05 {
        let x2 = x * x;
        x * (1.0 / 3.0 - x2 / 45.0 + 2.0 * x2 * x2 / 945.0)
    } else {
        coth(x) - 1.0 / x
    }
}

/// C(t) for finite β and t ≤ βħ/2 by windowed quadrature.
///
/// The equipartition part of coth integrates in closed form to
/// (κα/β)e^{−αt}; the quantum excess is integrated over [0, W] with
/// W = max(50α, 30/t, 50/(βħ)), which keeps the oscillation count
/// bounded on this branch, and the [W, ∞) remainder is restored through
/// the asymptotic expansion of the excess integrand in the oscillatory
/// tail integrals.
fn quadrature_c(spec: &BathSpec, beta: f64, t: f64) -> Result<f64, BathError> {
    let (kappa, alpha, hbar) = (spec.kappa, spec.alpha, spec.hbar);
    let ht_term = kappa * alpha / beta * (-alpha * t).exp();

    let w_cut = (50.0 * alpha)
        .max(OSC_TAIL_MIN_Z / t)
        .max(50.0 / (beta * hbar));
    let a2 = alpha * alpha;
    let front = hbar * kappa * a2 / std::f64::consts::PI;
    let excess = integrate(
        |w| front * w / (a2 + w * w) * coth_excess(0.5 * beta * hbar * w) * (w * t).cos(),
        0.0,
        w_cut,
        1e-10,
    )?
    .value;

    // Tail of the excess integrand beyond W from the expansions
    // ω/(α²+ω²) = 1/ω − α²/ω³ + α⁴/ω⁵ − ... and b(x) = 1 − 1/x (the
    // e^{−2x} remainder is below e^{−50} by the choice of W).
    let z = w_cut * t;
    let c1 = front;
    let c2 = -2.0 * kappa * a2 / (std::f64::consts::PI * beta);
    let c3 = -front * a2;
    let c4 = -c2 * a2;
    let c5 = front * a2 * a2;
    let t2 = t * t;
    let tail = c1 * osc_tail_cos(1, z)
        + c2 * t * osc_tail_cos(2, z)
        + c3 * t2 * osc_tail_cos(3, z)
        + c4 * t2 * t * osc_tail_cos(4, z)
        + c5 * t2 * t2 * osc_tail_cos(5, z);

    Ok(ht_term + excess + tail)
}

/// C(t) for finite β and t > βħ/2 by the residue series over the
/// cutoff pole and the Matsubara frequencies ν_n = 2πn/(βħ):
///   C = (ħκα²/2)cot(βħα/2)e^{−αt} + (2κα²/β)Σ_n ν_n e^{−ν_n t}/(ν_n²−α²).
/// On this branch ν_n t > πn, so the series needs only a handful of
/// terms. When α falls within 1e−4·α of some ν_m, the cutoff term and
/// the m-th Matsubara term individually blow up; their sum stays
/// finite and is evaluated through a cancellation-free merged form.
fn matsubara_c(spec: &BathSpec, beta: f64, t: f64) -> f64 {
    let (kappa, alpha, hbar) = (spec.kappa, spec.alpha, spec.hbar);
    let a2 = alpha * alpha;
    let nu1 = 2.0 * std::f64::consts::PI / (beta * hbar);
    let n_near = (alpha / nu1).round() as u64;
    let merged = n_near >= 1 && (alpha - n_near as f64 * nu1).abs() < 1e-4 * alpha;

    let mut total = if merged {
        merged_pair(spec, beta, t, n_near as f64 * nu1)
    } else {
        0.5 * hbar * kappa * a2 * cot(0.5 * beta * hbar * alpha) * (-alpha * t).exp()
    };
    let series_front = 2.0 * kappa * a2 / beta;
    for n in 1..=200u64 {
        if merged && n == n_near {
            continue;
        }
        let nu = n as f64 * nu1;
        let term = series_front * nu * (-nu * t).exp() / (nu * nu - a2);
        total += term;
        if term.abs() < 1e-18 * total.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    total
}

/// Sum of the cutoff-pole term and the nearest Matsubara term for
/// α ≈ ν: (κα²/(βδ))·e^{−αt}·[u·cot(u) − (2ν/(ν+α))e^{δt}] with
/// δ = α − ν and u = βħδ/2, rearranged so every piece is O(δ).
fn merged_pair(spec: &BathSpec, beta: f64, t: f64, nu: f64) -> f64 {
    let alpha = spec.alpha;
    let delta = alpha - nu;
    let scale = spec.kappa * alpha * alpha / beta * (-alpha * t).exp();
    if delta.abs() < 1e-12 * alpha {
        return scale * (0.5 / alpha - t);
    }
    let u = 0.5 * beta * spec.hbar * delta;
    // u·cot(u) − 1, series for small u to avoid the 1-cancellation.
    let ucotu_m1 = if u.abs() < 0.1 {
        let u2 = u * u;
        -u2 * (1.0 / 3.0 + u2 / 45.0 + 2.0 * u2 * u2 / 945.0)
    } else {
        u / u.tan() - 1.0
    };
    let d2 = delta / (nu + alpha);
    let em = f64::exp_m1(delta * t);
    // [u·cot(u) − (2ν/(ν+α))e^{δt}] = (u·cot(u) − 1) − e^{δt} + 1
    //   with 2ν/(ν+α) = 1 − δ/(ν+α):
    let bracket = ucotu_m1 - em + d2 + d2 * em;
    scale / delta * bracket
}

fn cot(x: f64) -> f64 {
    1.0 / x.tan()
}

/// C(t) at zero temperature:
/// C₀ = −(ħκα²/2π)[eˣEi(−x) + e⁻ˣEi(x)] with x = αt, evaluated through
/// overflow-free scaled exponential integrals. Negative for αt ≳ 1 and
/// asymptotic to −ħκ/(πt²).
fn zero_temperature_c(spec: &BathSpec, t: f64) -> f64 {
    let x = spec.alpha * t;
    let front = spec.hbar * spec.kappa * spec.alpha * spec.alpha / (2.0 * std::f64::consts::PI);
    // e^x Ei(−x) = −e^x E₁(x); both addends carried in scaled form.
    -front * (ei_scaled(x) - exp_e1_scaled(x))
}

const EULER_GAMMA: f64 = 0.577215664901532860606512;

/// eˣ·E₁(x) for x > 0: power series below 1, modified Lentz continued
/// fraction above.
fn exp_e1_scaled(x: f64) -> f64 {
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..40 {
            term *= -x / k as f64;
            let add = -term / k as f64;
            sum += add;
            if add.abs() < 1e-18 * sum.abs().max(1.0) {
                break;
            }
        }
        (-EULER_GAMMA - x.ln() + sum) * x.exp()
    } else {
        // E₁(x)·eˣ = 1/(x+1− 1²/(x+3− 2²/(x+5− ...))).
        let tiny = 1e-300;
        let mut f = tiny;
        let mut c = f;
        let mut d = 0.0;
        let mut b = x + 1.0;
        for k in 1..200u64 {
            let a = if k == 1 { 1.0 } else { -(((k - 1) * (k - 1)) as f64) };
            d = b + a * d;
            if d == 0.0 {
                d = tiny;
            }
            c = b + a / c;
            if c == 0.0 {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
            b += 2.0;
        }
        f
    }
}

/// e⁻ˣ·Ei(x) for x > 0: power series below 40, divergent asymptotic
/// series truncated at its smallest term above.
fn ei_scaled(x: f64) -> f64 {
    if x <= 40.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            term *= x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add < 1e-18 * sum {
                break;
            }
        }
        (EULER_GAMMA + x.ln() + sum) * (-x).exp()
    } else {
        let mut sum = 0.0;
        let mut term = 1.0 / x;
        let mut k = 1.0;
        loop {
            sum += term;
            let next = term * k / x;
            if next >= term || k > 500.0 {
                break;
            }
            term = next;
            k += 1.0;
        }
        sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn unit_bath() -> BathSpec {
        BathSpec::new(1.0, 1.0, 1.0, CouplingUnit::Action).unwrap()
    }

    #[test]
    fn constructor_rejects_bad_parameters() {
        assert!(matches!(
            BathSpec::new(-0.1, 1.0, 1.0, CouplingUnit::Action),
            Err(BathError::InvalidCoupling { .. })
        ));
        assert!(matches!(
            BathSpec::new(1.0, 0.0, 1.0, CouplingUnit::Action),
            Err(BathError::InvalidCutoff { .. })
        ));
        assert!(matches!(
            BathSpec::new(1.0, 1.0, -1.0, CouplingUnit::Frequency),
            Err(BathError::InvalidHbar { .. })
        ));
        assert!(matches!(
            ThermalState::finite(0.0),
            Err(BathError::InvalidBeta { .. })
        ));
        assert!(matches!(
            ThermalState::finite(f64::INFINITY),
            Err(BathError::InvalidBeta { .. })
        ));
    }

    #[test]
    fn gamma_values_and_shape() {
        let spec = unit_bath();
        assert_eq!(spectral_gamma(&spec, 0.0).unwrap(), 0.0);
        assert_relative_eq!(
            spectral_gamma(&spec, 1.0).unwrap(),
            1.0 / PI,
            max_relative = 1e-14
        );
        let sup = 2.0 / PI;
        let mut prev = 0.0;
        for i in 1..100 {
            let w = 0.3 * i as f64;
            let g = spectral_gamma(&spec, w).unwrap();
            assert!(g > prev && g < sup, "gamma not monotone below bound at {w}");
            prev = g;
        }
        assert_relative_eq!(spectral_gamma(&spec, 1e6).unwrap(), sup, max_relative = 1e-11);
        assert!(matches!(
            spectral_gamma(&spec, -1.0),
            Err(BathError::NegativeFrequency { .. })
        ));
    }

    #[test]
    fn j_slope_and_identity() {
        let spec = unit_bath();
        assert_relative_eq!(
            spectral_j(&spec, 1e-7).unwrap() / 1e-7,
            1.0 / PI,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            spectral_j(&spec, 1.0).unwrap(),
            0.5 / PI,
            max_relative = 1e-14
        );
        for i in 1..40 {
            let w = 0.25 * i as f64;
            let j = spectral_j(&spec, w).unwrap();
            let g = spectral_gamma(&spec, w).unwrap();
            assert_relative_eq!(j * 2.0 * w, g, max_relative = 1e-13);
        }
        assert!(matches!(
            spectral_j(&spec, 0.0),
            Err(BathError::NonPositiveFrequency { .. })
        ));
    }

    #[test]
    fn thermal_energy_limits() {
        let temp = ThermalState::finite(2.0).unwrap();
        assert_relative_eq!(thermal_energy(&temp, 1e-9, 1.0), 0.5, max_relative = 1e-10);
        assert_eq!(thermal_energy(&temp, 0.0, 1.0), 0.5);
        // beta*hbar*omega = 2 => E = (hbar*omega/2) * coth(1).
        let coth1 = 1.0 / f64::tanh(1.0);
        assert_relative_eq!(
            thermal_energy(&temp, 1.0, 1.0),
            0.5 * coth1,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            thermal_energy(&ThermalState::zero_temperature(), 3.0, 2.0),
            3.0,
            max_relative = 1e-14
        );
        // Even in omega.
        assert_eq!(
            thermal_energy(&temp, -1.3, 1.0),
            thermal_energy(&temp, 1.3, 1.0)
        );
    }

    #[test]
    fn ft_kms_and_positivity() {
        let spec = unit_bath();
        let temp = ThermalState::finite(2.0).unwrap();
        let ratio = correlator_ft(&spec, &temp, -1.0).unwrap() / correlator_ft(&spec, &temp, 1.0).unwrap();
        assert_relative_eq!(ratio, (-2.0f64).exp(), max_relative = 1e-12);

        for &beta in &[0.1, 1.0, 5.0] {
            let temp = ThermalState::finite(beta).unwrap();
            for i in 0..60 {
                let w = 0.01 * (10.0f64 / 0.01).powf(i as f64 / 59.0);
                let plus = correlator_ft(&spec, &temp, w).unwrap();
                let minus = correlator_ft(&spec, &temp, -w).unwrap();
                assert!(plus >= 0.0 && minus >= 0.0);
                assert_relative_eq!(minus, (-beta * w).exp() * plus, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn ft_zero_temperature_and_zero_frequency() {
        let spec = unit_bath();
        let zero = ThermalState::zero_temperature();
        assert_eq!(correlator_ft(&spec, &zero, -0.7).unwrap(), 0.0);
        let w = 0.7;
        assert_relative_eq!(
            correlator_ft(&spec, &zero, w).unwrap(),
            spectral_gamma(&spec, w).unwrap() / (2.0 * w),
            max_relative = 1e-14
        );
        assert!(matches!(
            correlator_ft(&spec, &zero, 0.0),
            Err(BathError::ZeroFrequency)
        ));
        let temp = ThermalState::finite(4.0).unwrap();
        assert_relative_eq!(
            correlator_ft_zero_limit(&spec, &temp),
            1.0 / (PI * 4.0),
            max_relative = 1e-14
        );
        assert_eq!(correlator_ft_zero_limit(&spec, &zero), 0.0);
        // The general formula approaches the limit from both sides.
        for &w in &[1e-4, -1e-4] {
            assert_relative_eq!(
                correlator_ft(&spec, &temp, w).unwrap(),
                correlator_ft_zero_limit(&spec, &temp),
                max_relative = 1e-3
            );
        }
    }

    #[test]
    fn correlator_symmetries() {
        let spec = unit_bath();
        for temp in [ThermalState::finite(2.0).unwrap(), ThermalState::zero_temperature()] {
            let plus = correlator(&spec, &temp, 0.7).unwrap();
            let minus = correlator(&spec, &temp, -0.7).unwrap();
            assert_eq!(plus.c, minus.c);
            assert_eq!(plus.d, -minus.d);
        }
        assert!(matches!(
            correlator(&spec, &ThermalState::zero_temperature(), 0.0),
            Err(BathError::UltravioletDivergence)
        ));
    }

    #[test]
    fn imaginary_part_is_exact_for_all_temperatures() {
        let spec = unit_bath();
        let expected = -0.5 * (-1.0f64).exp();
        for temp in [
            ThermalState::finite(0.01).unwrap(),
            ThermalState::finite(2.0).unwrap(),
            ThermalState::finite(100.0).unwrap(),
            ThermalState::zero_temperature(),
        ] {
            let v = correlator(&spec, &temp, 1.0).unwrap();
            assert_relative_eq!(v.d, expected, max_relative = 1e-14);
        }
    }

    #[test]
    fn high_temperature_closed_form() {
        let spec = unit_bath();
        let temp = ThermalState::finite(0.01).unwrap();
        let v = correlator(&spec, &temp, 1.0).unwrap();
        assert_relative_eq!(v.c, 100.0 * (-1.0f64).exp(), max_relative = 1e-4);

        // beta*hbar*alpha = 1e-3: the closed forms hold to 1e-4.
        let temp = ThermalState::finite(1e-3).unwrap();
        for &t in &[0.1, 0.5, 1.0, 3.0] {
            let v = correlator(&spec, &temp, t).unwrap();
            let ht = 1e3 * (-t).exp();
            assert_relative_eq!(v.c, ht, max_relative = 1e-4);
            assert_relative_eq!(v.d, -0.5 * (-t).exp(), max_relative = 1e-12);
        }
    }

    #[test]
    fn real_part_reference_values() {
        let spec = unit_bath();
        let temp = ThermalState::finite(2.0).unwrap();
        let cases = [
            (0.3, 0.40969785465564771737),
            (1.0, 0.13372648893816088176),
            (4.0, 0.0058814034535910590324),
        ];
        for (t, expect) in cases {
            let v = correlator(&spec, &temp, t).unwrap();
            assert_relative_eq!(v.c, expect, max_relative = 1e-9);
        }
        let v = correlator(&spec, &ThermalState::finite(0.5).unwrap(), 1.0).unwrap();
        assert_relative_eq!(v.c, 0.720367438909776665, max_relative = 1e-10);
        // Low temperature: C goes negative.
        let v = correlator(&spec, &ThermalState::finite(20.0).unwrap(), 3.0).unwrap();
        assert_relative_eq!(v.c, -0.0345167603317865527, max_relative = 1e-9);
    }

    #[test]
    fn quadrature_and_series_branches_agree() {
        let spec = unit_bath();
        for &beta in &[0.8, 2.0, 7.0] {
            for &t in &[0.31, 0.9, 2.7] {
                let q = quadrature_c(&spec, beta, t).unwrap();
                let s = matsubara_c(&spec, beta, t);
                assert_relative_eq!(q, s, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn degenerate_cutoff_matches_series_limit() {
        let spec = unit_bath();
        // alpha = nu_1 exactly at beta = 2*pi.
        let c_exact = correlator(&spec, &ThermalState::finite(2.0 * PI).unwrap(), 0.7)
            .unwrap()
            .c;
        assert_relative_eq!(c_exact, 0.0597369291264761691, max_relative = 1e-10);
        let near = 2.0 * PI * (1.0 + 1e-9);
        let c_near = correlator(&spec, &ThermalState::finite(near).unwrap(), 0.7)
            .unwrap()
            .c;
        assert_relative_eq!(c_near, 0.0597369290820007435, max_relative = 1e-9);
        // The merged pair joins continuously onto the plain series just
        // outside its activation threshold.
        for &eps in &[2e-4, 9e-5] {
            let b = 2.0 * PI * (1.0 + eps);
            let c = correlator(&spec, &ThermalState::finite(b).unwrap(), 0.7)
                .unwrap()
                .c;
            assert_relative_eq!(c, c_exact, max_relative = 1e-3);
        }
    }

    #[test]
    fn zero_temperature_reference_values() {
        let spec = unit_bath();
        let zero = ThermalState::zero_temperature();
        let cases = [
            (0.5, 0.10303887316401184385),
            (2.0, -0.049203402062420571343),
            (10.0, -0.0034351504019720279117),
            (100.0, -0.000031850125570332610605),
        ];
        for (t, expect) in cases {
            let v = correlator(&spec, &zero, t).unwrap();
            assert_relative_eq!(v.c, expect, max_relative = 1e-11);
        }
        // Power-law tail -hbar*kappa/(pi t^2).
        let v = correlator(&spec, &zero, 100.0).unwrap();
        assert_relative_eq!(v.c, -1.0 / (PI * 1e4), max_relative = 1e-3);
    }

    #[test]
    fn zero_temperature_quadrature_cross_check() {
        // Independent route: windowed quadrature of the b=1 integrand
        // with the analytic tail, against the exponential-integral form.
        let spec = unit_bath();
        for &t in &[0.5, 2.0, 5.0] {
            let w_cut = (50.0f64).max(OSC_TAIL_MIN_Z / t);
            let quad = integrate(
                |w: f64| w / (PI * (1.0 + w * w)) * (w * t).cos(),
                0.0,
                w_cut,
                1e-10,
            )
            .unwrap()
            .value;
            let z = w_cut * t;
            let t2 = t * t;
            let tail = (osc_tail_cos(1, z) - t2 * osc_tail_cos(3, z) + t2 * t2 * osc_tail_cos(5, z)) / PI;
            let direct = quad + tail;
            let closed = zero_temperature_c(&spec, t);
            assert_relative_eq!(direct, closed, max_relative = 1e-8);
        }
    }

    #[test]
    fn fluctuation_dissipation_identity() {
        // FT the quadrature-computed C and D over a window long enough
        // for the exponential decay to die, then test
        // C~(w)*hbar*w = 2 E_beta(w) * (i D~(w)).
        let spec = unit_bath();
        let temp = ThermalState::finite(2.0).unwrap();
        let horizon = 30.0;
        for &w in &[0.5, 1.0, 2.0] {
            let c_ft = integrate(
                |t: f64| correlator(&spec, &temp, t).unwrap().c * (w * t).cos(),
                1e-9,
                horizon,
                1e-9,
            )
            .unwrap()
            .value
                / PI;
            let id_ft = -integrate(
                |t: f64| correlator(&spec, &temp, t).unwrap().d * (w * t).sin(),
                1e-9,
                horizon,
                1e-9,
            )
            .unwrap()
            .value
                / PI;
            let lhs = c_ft * w;
            let rhs = 2.0 * thermal_energy(&temp, w, 1.0) * id_ft;
            assert_relative_eq!(lhs, rhs, max_relative = 2e-5);
        }
    }

    #[test]
    fn ft_matches_correlator_transform() {
        // alpha~(w) = C~(w) + (iD~)(w) ties correlator_ft to the
        // time-domain routine through an independent numerical FT.
        let spec = unit_bath();
        let temp = ThermalState::finite(2.0).unwrap();
        let horizon = 30.0;
        for &w in &[0.7, 1.5] {
            let c_ft = integrate(
                |t: f64| correlator(&spec, &temp, t).unwrap().c * (w * t).cos(),
                1e-9,
                horizon,
                1e-9,
            )
            .unwrap()
            .value
                / PI;
            let id_ft = -integrate(
                |t: f64| correlator(&spec, &temp, t).unwrap().d * (w * t).sin(),
                1e-9,
                horizon,
                1e-9,
            )
            .unwrap()
            .value
                / PI;
            let direct = correlator_ft(&spec, &temp, w).unwrap();
            assert_relative_eq!(c_ft + id_ft, direct, max_relative = 2e-5);
        }
    }
}
