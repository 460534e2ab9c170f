//! Damped central oscillator coupled to a Drude bath: exact
//! characteristic rates from the cubic characteristic equation, the
//! response amplitude A(t) and its derivative, Markovian-limit and
//! second-order perturbative rates, the overdamping threshold, and a
//! discretized finite-bath oracle for the mean displacement.
//!
//! The mean displacement obeys ⟨Q(t)⟩ = Ȧ(t)⟨Q(0)⟩ + A(t)⟨P(0)⟩ where
//! the amplitude A is the inverse Laplace transform of
//! (s + α) / [s³ + αs² + (ω₀² + ακ)s + αω₀²]. The cubic's roots are
//! −λ and −Γ ± iΩ; overdamping sets in when the complex pair collides
//! on the real axis, which in the Markovian limit α ≫ ω₀ happens at
//! the critical coupling κ_c = 2ω₀.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::bath::{spectral_gamma, BathSpec, CouplingUnit};
use crate::numerics::{
    cubic_roots, integrate, integrate_to_infinity, linear_ode_rk4, pv_integral_real_line,
    NumericsError,
};
use crate::spin::DampingRegime;
use crate::tol;

/// Pairwise root spread (relative to the root magnitude scale) below
/// which the three characteristic roots count as a triple collision,
/// where the λ/pair split is no longer meaningful.
const TRIPLE_ROOT_WINDOW: f64 = 1e-4;

/// |(λ−Γ)² + Ω²| below this fraction of the rate scale switches the
/// amplitude to the double-root limit formula.
const DEGENERACY_BAND: f64 = 1e-8;

/// ξ = Ω²t² threshold below which the trigonometric kernels are
/// evaluated by series.
const KERNEL_SERIES_THRESHOLD: f64 = 1e-4;

/// Fixed integrator step for the oracle, as a fraction of the fastest
/// oscillation period scale 1/max(ω_max, ω₀).
const ORACLE_STEP_FACTOR: f64 = 0.05;

/// Minimum oscillator count accepted by the finite-bath oracle.
const MIN_ORACLE_OSCILLATORS: usize = 100;

/// The oracle's frequency grid must extend to at least this many bath
/// decay rates so the spectral tail is represented.
const MIN_CUTOFF_FACTOR: f64 = 10.0;

#[derive(Debug, Error)]
pub enum QbmError {
    #[error("oscillator frequency must be positive and finite")]
    InvalidFrequency,
    #[error("coupling must be nonnegative and finite")]
    InvalidCoupling,
    #[error("bath decay rate must be positive and finite")]
    InvalidBathRate,
    #[error("inverse temperature must be positive and finite")]
    InvalidBeta,
    #[error("hbar must be positive and finite")]
    InvalidHbar,
    #[error("coupling strength must carry frequency units")]
    WrongCouplingUnit,
    #[error("rates must be finite with gamma >= 0 and lambda > 0")]
    InvalidRates,
    #[error("initial means must be finite")]
    InvalidState,
    #[error("time must be nonnegative and finite")]
    InvalidTime,
    #[error(
        "characteristic rates within [{lower}, {upper}] are too close to a \
         triple collision to classify"
    )]
    NearTripleRoot { lower: f64, upper: f64 },
    #[error("characteristic-equation residual {residual:.3e} exceeds the allowed tolerance")]
    ResidualTooLarge { residual: f64 },
    #[error("oracle needs at least {min} bath oscillators, got {requested}")]
    TooFewOscillators { requested: usize, min: usize },
    #[error("oracle cutoff must reach at least ten bath decay rates")]
    GridTooNarrow,
    #[error("horizon {requested} exceeds half the discrete recurrence time {limit}")]
    RecurrenceExceeded { requested: f64, limit: f64 },
    #[error("no overdamped window below coupling {max_tested}")]
    NoTransition { max_tested: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Central oscillator of frequency ω₀ coupled with strength κ to a
/// bath whose coupling-agent autocorrelation decays at rate α. Both κ
/// and α carry frequency units.
#[derive(Debug, Clone, Copy)]
pub struct QbmModel {
    omega0: f64,
    kappa: f64,
    alpha: f64,
    beta: f64,
    hbar: f64,
}

impl QbmModel {
    pub fn new(
        omega0: f64,
        kappa: f64,
        alpha: f64,
        beta: f64,
        hbar: f64,
        unit: CouplingUnit,
    ) -> Result<Self, QbmError> {
        if unit != CouplingUnit::Frequency {
            return Err(QbmError::WrongCouplingUnit);
        }
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(QbmError::InvalidFrequency);
        }
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(QbmError::InvalidCoupling);
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(QbmError::InvalidBathRate);
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(QbmError::InvalidBeta);
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(QbmError::InvalidHbar);
        }
        Ok(Self {
            omega0,
            kappa,
            alpha,
            beta,
            hbar,
        })
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }
}

/// The three characteristic rates. `omega2` is the squared shifted
/// frequency of the oscillatory pair and may be negative (overdamped);
/// `lambda` is the shifted bath decay rate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct QbmRates {
    pub gamma: f64,
    pub omega2: f64,
    pub lambda: f64,
}

/// Mean position and momentum of the central oscillator.
#[derive(Debug, Clone, Copy)]
pub struct OscillatorMeanState {
    pub q_mean: f64,
    pub p_mean: f64,
}

/// Second-order rates together with the stationary momentum variance
/// and the high-temperature mixed-diffusion coefficient.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PerturbativeRates {
    pub gamma: f64,
    pub omega2: f64,
    pub p2_eq: f64,
    pub mixed_coefficient: f64,
}

/// Stability bound of the bare-oscillator (Ullersma) parameterization
/// and the frequency renormalization connecting it to this module's
/// physical-frequency convention.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct UllersmaBound {
    pub kappa_max: f64,
    pub renormalized_omega0_sq: f64,
}

/// Uniform midpoint discretization of the bath spectral strength for
/// the brute-force oracle: ε_n² = γ(ω_n)Δω on ω_n = (n − 1/2)Δω.
#[derive(Debug, Clone)]
pub struct DiscretizedBath {
    frequencies: Vec<f64>,
    couplings: Vec<f64>,
    delta_omega: f64,
}

impl DiscretizedBath {
    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn delta_omega(&self) -> f64 {
        self.delta_omega
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }
}

fn bath_spec(model: &QbmModel) -> BathSpec {
    BathSpec::new(model.kappa, model.alpha, model.hbar, CouplingUnit::Frequency)
        .expect("model parameters already validated")
}

/// Solves the characteristic cubic s³ + αs² + (ω₀² + ακ)s + αω₀² = 0
/// and sorts its roots into −λ and −Γ ± iΩ. With three real roots the
/// most negative one is −λ: it is continuously connected to −α as
/// κ → 0 and cannot cross the pair without a flagged triple collision.
pub fn exact_rates(model: &QbmModel) -> Result<QbmRates, QbmError> {
    let w0sq = model.omega0 * model.omega0;
    if model.kappa == 0.0 {
        return Ok(QbmRates {
            gamma: 0.0,
            omega2: w0sq,
            lambda: model.alpha,
        });
    }
    let a2 = model.alpha;
    let a1 = w0sq + model.alpha * model.kappa;
    let a0 = model.alpha * w0sq;
    let cubic = cubic_roots(a2, a1, a0);
    let roots = cubic.roots;

    let scale = roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let spread = (0..3)
        .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
        .map(|(i, j)| (roots[i] - roots[j]).norm())
        .fold(0.0, f64::max);
    if spread < TRIPLE_ROOT_WINDOW * scale {
        let lo = roots.iter().map(|r| -r.re).fold(f64::INFINITY, f64::min);
        let hi = roots.iter().map(|r| -r.re).fold(0.0, f64::max);
        return Err(QbmError::NearTripleRoot {
            lower: lo,
            upper: hi,
        });
    }

    let (mut gamma, omega2, lambda) = if cubic.all_real() {
        // Ascending order: roots[0] is the most negative.
        let pair_lo = roots[1].re;
        let pair_hi = roots[2].re;
        let half_gap = 0.5 * (pair_hi - pair_lo);
        (
            -0.5 * (pair_lo + pair_hi),
            -half_gap * half_gap,
            -roots[0].re,
        )
    } else {
        (-roots[1].re, roots[1].im * roots[1].im, -roots[0].re)
    };
    if gamma < 0.0 && gamma.abs() <= 1e-12 * scale {
        gamma = 0.0;
    }

    let resid = [
        ((lambda + 2.0 * gamma) - a2).abs() / a2.abs(),
        ((gamma * gamma + omega2 + 2.0 * lambda * gamma) - a1).abs() / a1.abs(),
        (lambda * (gamma * gamma + omega2) - a0).abs() / a0.abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    if resid > tol::CUBIC_RESIDUAL {
        return Err(QbmError::ResidualTooLarge { residual: resid });
    }
    Ok(QbmRates {
        gamma,
        omega2,
        lambda,
    })
}

/// Markovian-limit rates Γ = κ/2, Ω² = ω₀² − κ²/4, λ = α.
pub fn markov_rates(model: &QbmModel) -> QbmRates {
    QbmRates {
        gamma: 0.5 * model.kappa,
        omega2: model.omega0 * model.omega0 - 0.25 * model.kappa * model.kappa,
        lambda: model.alpha,
    }
}

/// Scale separation α / max|−Γ ± iΩ| of the Markovian-limit rates.
/// Values ≫ 1 justify the Markovian closed forms; the ratio is
/// reported, never enforced.
pub fn markov_validity_ratio(model: &QbmModel) -> f64 {
    let r = markov_rates(model);
    let pair_scale = if r.omega2 >= 0.0 {
        (r.gamma * r.gamma + r.omega2).sqrt()
    } else {
        r.gamma + (-r.omega2).sqrt()
    };
    model.alpha / pair_scale
}

/// Second-order (Redfield) rates in the long-time limit, with the
/// stationary momentum variance and the high-temperature value of the
/// mixed coefficient (Ω_p² + Γ_p²)⟨Q²⟩_eq − ⟨P²⟩_eq.
pub fn perturbative_rates(model: &QbmModel) -> PerturbativeRates {
    let w0sq = model.omega0 * model.omega0;
    let asq = model.alpha * model.alpha;
    let denom = asq + w0sq;
    let gamma = 0.5 * model.kappa * asq / denom;
    let shifted_sq = w0sq + model.kappa * model.alpha - model.kappa * asq * model.alpha / denom;
    let x = 0.5 * model.beta * model.hbar * model.omega0;
    let p2_eq = 0.5 * model.hbar * model.omega0 / x.tanh();
    PerturbativeRates {
        gamma,
        omega2: shifted_sq - gamma * gamma,
        p2_eq,
        mixed_coefficient: model.kappa * model.alpha / (model.beta * denom),
    }
}

/// Damped oscillatory kernels (e^{−Γt}cos Ωt, e^{−Γt}sin(Ωt)/Ω),
/// continued through Ω² ≤ 0. The overdamped branch is written as two
/// decaying exponentials so no intermediate grows when Γ ≥ |Ω|.
fn damped_kernels(gamma: f64, omega2: f64, t: f64) -> (f64, f64) {
    let xi = omega2 * t * t;
    if xi.abs() < KERNEL_SERIES_THRESHOLD {
        let damp = (-gamma * t).exp();
        let c = 1.0 - xi * (0.5 - xi * (1.0 / 24.0 - xi / 720.0));
        let s = t * (1.0 - xi * (1.0 / 6.0 - xi * (1.0 / 120.0 - xi / 5040.0)));
        (damp * c, damp * s)
    } else if omega2 > 0.0 {
        let om = omega2.sqrt();
        let damp = (-gamma * t).exp();
        (damp * (om * t).cos(), damp * (om * t).sin() / om)
    } else {
        let w = (-omega2).sqrt();
        let slow = (-(gamma - w) * t).exp();
        let fast = (-(gamma + w) * t).exp();
        (0.5 * (slow + fast), 0.5 * (slow - fast) / w)
    }
}

fn check_time(t: f64) -> Result<(), QbmError> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(QbmError::InvalidTime);
    }
    Ok(())
}

fn check_rates(rates: &QbmRates) -> Result<(), QbmError> {
    let ok = rates.gamma.is_finite()
        && rates.omega2.is_finite()
        && rates.lambda.is_finite()
        && rates.gamma >= 0.0
        && rates.lambda > 0.0;
    if ok {
        Ok(())
    } else {
        Err(QbmError::InvalidRates)
    }
}

/// True when (λ−Γ)² + Ω² vanishes to within the degeneracy band, i.e.
/// the λ mode collides with one member of the damped pair and the
/// amplitude is evaluated by its double-root limit.
pub fn is_resonant_degenerate(rates: &QbmRates) -> bool {
    let u = rates.lambda - rates.gamma;
    let d = u * u + rates.omega2;
    let scale = (u * u).max(rates.omega2.abs());
    scale == 0.0 || d.abs() < DEGENERACY_BAND * scale
}

/// Response amplitude A(t) and its time derivative.
///
/// A is regrouped as e^{−Γt}S + 2Γ(e^{−λt} − e^{−Γt}C + u e^{−Γt}S)/d
/// with u = λ − Γ and d = u² + Ω²; the bracket vanishes with d, so the
/// double-root limit d → 0 is taken analytically inside the degeneracy
/// band instead of by cancellation. A(0) = 0, Ȧ(0) = 1 hold exactly.
pub fn amplitude_with_derivative(rates: &QbmRates, t: f64) -> Result<(f64, f64), QbmError> {
    check_rates(rates)?;
    check_time(t)?;
    let g = rates.gamma;
    let om2 = rates.omega2;
    let lam = rates.lambda;
    let u = lam - g;
    let d = u * u + om2;
    let scale = (u * u).max(om2.abs());
    if scale == 0.0 {
        // All three rates collide at Γ: A(t) = t e^{−Γt}(1 + Γt).
        let e = (-g * t).exp();
        let a = t * e * (1.0 + g * t);
        let adot = e * (1.0 + g * t * (1.0 - g * t));
        return Ok((a, adot));
    }
    let (cbar, sbar) = damped_kernels(g, om2, t);
    let e_lam = (-lam * t).exp();
    let (ratio, ratio_dot) = if d.abs() < DEGENERACY_BAND * scale {
        (
            (sbar - t * e_lam) / (2.0 * u),
            (cbar - g * sbar - (1.0 - lam * t) * e_lam) / (2.0 * u),
        )
    } else {
        let ebar = e_lam - cbar + u * sbar;
        let ebar_dot = -lam * e_lam + om2 * sbar + g * cbar + u * (cbar - g * sbar);
        (ebar / d, ebar_dot / d)
    };
    Ok((
        sbar + 2.0 * g * ratio,
        cbar - g * sbar + 2.0 * g * ratio_dot,
    ))
}

/// Response amplitude A(t) in the full three-rate form.
pub fn amplitude(rates: &QbmRates, t: f64) -> Result<f64, QbmError> {
    Ok(amplitude_with_derivative(rates, t)?.0)
}

/// Markovian short form A(t) = e^{−Γt} sin(Ωt)/Ω, continued through
/// Ω² ≤ 0; valid for t ≫ 1/λ.
pub fn amplitude_markov(rates: &QbmRates, t: f64) -> Result<f64, QbmError> {
    check_rates(rates)?;
    check_time(t)?;
    Ok(damped_kernels(rates.gamma, rates.omega2, t).1)
}

/// Mean displacement ⟨Q(t)⟩ = Ȧ(t)q₀ + A(t)p₀.
pub fn mean_displacement(
    rates: &QbmRates,
    init: &OscillatorMeanState,
    t: f64,
) -> Result<f64, QbmError> {
    if !(init.q_mean.is_finite() && init.p_mean.is_finite()) {
        return Err(QbmError::InvalidState);
    }
    let (a, adot) = amplitude_with_derivative(rates, t)?;
    Ok(adot * init.q_mean + a * init.p_mean)
}

/// The three characteristic roots −λ and −Γ ± iΩ (the pair splits
/// along the real axis when Ω² < 0).
pub fn modes(rates: &QbmRates) -> [Complex64; 3] {
    let g = rates.gamma;
    if rates.omega2 >= 0.0 {
        let om = rates.omega2.sqrt();
        [
            Complex64::new(-rates.lambda, 0.0),
            Complex64::new(-g, om),
            Complex64::new(-g, -om),
        ]
    } else {
        let w = (-rates.omega2).sqrt();
        [
            Complex64::new(-rates.lambda, 0.0),
            Complex64::new(-g + w, 0.0),
            Complex64::new(-g - w, 0.0),
        ]
    }
}

/// Real part of the slowest-decaying mode.
pub fn slowest_rate(rates: &QbmRates) -> f64 {
    let pair = if rates.omega2 >= 0.0 {
        -rates.gamma
    } else {
        -rates.gamma + (-rates.omega2).sqrt()
    };
    pair.max(-rates.lambda)
}

/// Classifies the damping regime of a rate set; `tol_band` is the
/// relative width of the critical band around Ω² = 0.
pub fn damping_regime(rates: &QbmRates, tol_band: f64) -> DampingRegime {
    assert!(tol_band > 0.0, "tolerance band must be positive");
    let scale = (rates.omega2 + rates.gamma * rates.gamma)
        .abs()
        .max(rates.gamma * rates.gamma);
    if rates.omega2.abs() <= tol_band * scale {
        DampingRegime::Critical
    } else if rates.omega2 > 0.0 {
        DampingRegime::Normal
    } else {
        DampingRegime::Overdamped
    }
}

/// Markovian critical coupling κ_c = 2ω₀.
pub fn kappa_critical(model: &QbmModel) -> f64 {
    2.0 * model.omega0
}

/// Exact transition locator: the smallest coupling at which the
/// characteristic cubic's discriminant vanishes and the complex pair
/// collides on the real axis. The model's own coupling is ignored;
/// couplings up to α are scanned. Approaches 2ω₀ as α/ω₀ → ∞.
pub fn kappa_critical_exact(model: &QbmModel) -> Result<f64, QbmError> {
    let w0sq = model.omega0 * model.omega0;
    let a2 = model.alpha;
    let a0 = model.alpha * w0sq;
    let disc = |kappa: f64| {
        let a1 = w0sq + model.alpha * kappa;
        18.0 * a2 * a1 * a0 - 4.0 * a2.powi(3) * a0 + a2 * a2 * a1 * a1
            - 4.0 * a1.powi(3)
            - 27.0 * a0 * a0
    };
    // The pair is complex at κ = 0 (discriminant negative); walk up
    // until it turns positive, then bisect onto the lower window edge.
    let mut lo = 0.0;
    let mut probe = 1e-2 * model.omega0;
    let mut hi = None;
    while probe <= model.alpha * 1.0000001 {
        if disc(probe) > 0.0 {
            hi = Some(probe);
            break;
        }
        lo = probe;
        probe *= 1.1;
    }
    let Some(mut hi) = hi else {
        return Err(QbmError::NoTransition {
            max_tested: model.alpha,
        });
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if disc(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Stability bound κ_max = ω₀²/α of the bare-frequency
/// parameterization, and the renormalized frequency ω₀² + κα.
pub fn ullersma_bound(model: &QbmModel) -> UllersmaBound {
    let w0sq = model.omega0 * model.omega0;
    UllersmaBound {
        kappa_max: w0sq / model.alpha,
        renormalized_omega0_sq: physical_to_ullersma_sq(w0sq, model.kappa, model.alpha),
    }
}

/// Maps the physical (counterterm-included) squared frequency to the
/// bare Ullersma one: ω₀² → ω₀² + κα.
pub fn physical_to_ullersma_sq(omega0_sq: f64, kappa: f64, alpha: f64) -> f64 {
    omega0_sq + kappa * alpha
}

/// Inverse of [`physical_to_ullersma_sq`].
pub fn ullersma_to_physical_sq(omega_u_sq: f64, kappa: f64, alpha: f64) -> f64 {
    omega_u_sq - kappa * alpha
}

/// Bath-dressed characteristic function g(z) = z² − ω₀² − κα
/// − ∫₀^∞ γ(ω)/(z² − ω²) dω by quadrature: principal value on the real
/// axis, plain complex quadrature off it. Diagnostic only.
pub fn resolvent(model: &QbmModel, z: Complex64) -> Result<Complex64, QbmError> {
    let w0sq = model.omega0 * model.omega0;
    let renorm = model.kappa * model.alpha;
    let base = z * z - Complex64::new(w0sq + renorm, 0.0);
    let spec = bath_spec(model);
    let gam = move |w: f64| spectral_gamma(&spec, w.abs()).expect("nonnegative frequency");
    if z.im == 0.0 {
        let x = z.re;
        let integral = if x == 0.0 {
            // γ(ω)/(0 − ω²) integrates to −κα in closed form.
            -renorm
        } else {
            let half_width = 25.0 * x.abs().max(model.alpha).max(model.omega0);
            0.5 * pv_integral_real_line(
                |w| gam(w) / ((x - w) * (x + w)),
                &[x, -x],
                half_width,
                tol::PV_REL,
            )?
        };
        Ok(base - integral)
    } else {
        let zsq = z * z;
        let cut = 50.0 * model.alpha.max(z.norm()).max(model.omega0);
        let f = move |w: f64| gam(w) / (zsq - w * w);
        let re = integrate(|w| f(w).re, 0.0, cut, tol::QUAD_REL)?.value
            + integrate_to_infinity(|w| f(w).re, cut, tol::QUAD_REL)?.value;
        let im = integrate(|w| f(w).im, 0.0, cut, tol::QUAD_REL)?.value
            + integrate_to_infinity(|w| f(w).im, cut, tol::QUAD_REL)?.value;
        Ok(base - Complex64::new(re, im))
    }
}

/// Analytic continuation of the upper-half-plane resolvent through the
/// real axis: g(z) = z² − ω₀² − κα + κα²/(α − iz). Its zeros sit at
/// z = i·s for the characteristic roots s, tying the cubic to the
/// dressed eigenfrequency condition.
pub fn resolvent_continuation(model: &QbmModel, z: Complex64) -> Complex64 {
    let a = model.alpha;
    z * z - Complex64::new(model.omega0 * model.omega0 + model.kappa * a, 0.0)
        + model.kappa * a * a / (Complex64::new(a, 0.0) - Complex64::i() * z)
}

/// Midpoint discretization of the spectral strength for the oracle.
pub fn discretize_bath(
    model: &QbmModel,
    n_osc: usize,
    omega_max: f64,
) -> Result<DiscretizedBath, QbmError> {
    if n_osc < MIN_ORACLE_OSCILLATORS {
        return Err(QbmError::TooFewOscillators {
            requested: n_osc,
            min: MIN_ORACLE_OSCILLATORS,
        });
    }
    if !(omega_max.is_finite() && omega_max >= MIN_CUTOFF_FACTOR * model.alpha) {
        return Err(QbmError::GridTooNarrow);
    }
    let spec = bath_spec(model);
    let dw = omega_max / n_osc as f64;
    let mut frequencies = Vec::with_capacity(n_osc);
    let mut couplings = Vec::with_capacity(n_osc);
    for i in 0..n_osc {
        let w = (i as f64 + 0.5) * dw;
        let g = spectral_gamma(&spec, w).expect("midpoint frequencies are positive");
        frequencies.push(w);
        couplings.push((g * dw).sqrt());
    }
    Ok(DiscretizedBath {
        frequencies,
        couplings,
        delta_omega: dw,
    })
}

/// Central-oscillator bare frequency of the discretized model: the
/// physical ω₀² plus the discrete counterterm Σ ε_n²/ω_n², so the
/// dressed frequency matches the continuum convention.
fn bare_frequency_sq(model: &QbmModel, bath: &DiscretizedBath) -> f64 {
    let counter: f64 = bath
        .frequencies
        .iter()
        .zip(&bath.couplings)
        .map(|(w, e)| e * e / (w * w))
        .sum();
    model.omega0 * model.omega0 + counter
}

/// Integrates the (2N+2)-dimensional linear system for the means with
/// state layout [q₀, p₀, q₁.., p₁..]; returns the state at each grid
/// time. `times` must start at 0.
fn integrate_discrete(
    model: &QbmModel,
    bath: &DiscretizedBath,
    init: &OscillatorMeanState,
    times: &[f64],
) -> Result<Vec<Vec<f64>>, QbmError> {
    let n = bath.len();
    let dim = 2 * n + 2;
    let bare = bare_frequency_sq(model, bath);
    let eps = bath.couplings.clone();
    let w2: Vec<f64> = bath.frequencies.iter().map(|w| w * w).collect();
    let apply = move |y: &[f64], out: &mut [f64]| {
        out[0] = y[1];
        let mut drive = 0.0;
        for i in 0..n {
            drive += eps[i] * y[2 + i];
        }
        out[1] = -bare * y[0] + drive;
        for i in 0..n {
            out[2 + i] = y[2 + n + i];
            out[2 + n + i] = -w2[i] * y[2 + i] + eps[i] * y[0];
        }
    };
    let omega_max = bath.delta_omega * n as f64;
    let max_step = ORACLE_STEP_FACTOR / omega_max.max(model.omega0);
    let mut y0 = vec![0.0; dim];
    y0[0] = init.q_mean;
    y0[1] = init.p_mean;
    Ok(linear_ode_rk4(dim, apply, &y0, times, max_step)?)
}

/// Total energy of the discretized linear system (kinetic plus
/// potential plus bilinear coupling), conserved by the exact flow.
#[cfg(test)]
fn system_energy(bare: f64, bath: &DiscretizedBath, y: &[f64]) -> f64 {
    let n = bath.len();
    let mut h = 0.5 * (y[1] * y[1] + bare * y[0] * y[0]);
    for i in 0..n {
        let q = y[2 + i];
        let p = y[2 + n + i];
        let w = bath.frequencies[i];
        h += 0.5 * (p * p + w * w * q * q) - bath.couplings[i] * q * y[0];
    }
    h
}

/// Brute-force mean displacement from a bath of `n_osc` explicit
/// oscillators on a uniform grid up to `omega_max`, with the bath
/// means starting at zero. Converges to [`mean_displacement`] with the
/// exact rates as the grid refines, for horizons short of the discrete
/// recurrence; horizons past half the recurrence time 2π/Δω are
/// refused.
pub fn finite_bath_oracle(
    model: &QbmModel,
    n_osc: usize,
    omega_max: f64,
    init: &OscillatorMeanState,
    times: &[f64],
) -> Result<Vec<f64>, QbmError> {
    if !(init.q_mean.is_finite() && init.p_mean.is_finite()) {
        return Err(QbmError::InvalidState);
    }
    if times.is_empty() || times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(QbmError::Numerics(NumericsError::BadTimeGrid));
    }
    let bath = discretize_bath(model, n_osc, omega_max)?;
    let horizon = *times.last().expect("nonempty grid");
    let limit = std::f64::consts::PI / bath.delta_omega;
    if horizon > limit {
        return Err(QbmError::RecurrenceExceeded {
            requested: horizon,
            limit,
        });
    }
    let (grid, skip) = if times[0] > 0.0 {
        let mut g = Vec::with_capacity(times.len() + 1);
        g.push(0.0);
        g.extend_from_slice(times);
        (g, 1)
    } else {
        (times.to_vec(), 0)
    };
    let states = integrate_discrete(model, &bath, init, &grid)?;
    Ok(states.into_iter().skip(skip).map(|y| y[0]).collect())
}
