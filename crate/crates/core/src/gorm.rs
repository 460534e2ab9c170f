//! Spin coupled to a random-matrix environment: seeded Gaussian
//! orthogonal ensemble sampling, the microcanonical bath correlator and
//! its semicircle transform, Markovian damping rates with the critical
//! coupling, and exact dynamics by full diagonalization.
//!
//! The bath Hamiltonian and the coupling agent are independent GOE
//! matrices of dimension N/2 scaled by 1/√(8N), which puts the mean
//! level density on the semicircle of radius 1/2. A microcanonical
//! shell of bath eigenstates centered at energy ε selects the
//! correlator α(ε,t) = η² J₁(t/2ħ)/(4t/ħ) · e^{iεt/ħ}, whose transform
//! α̃(ε,ω) = (η²ħ/2π)√(1/4 − (ε+ħω)²) feeds the same Bloch-equation
//! rates as any other environment of this family. The semicircle puts
//! the whole correlation time at scale ħ, so a spin with ω₀ ≪ 1 can be
//! overdamped while η stays deep in the perturbative regime.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{bessel_j1, integrate, pv_integral, symmetric_eig, GaussianStream, NumericsError};
use crate::spin::{BlochVector, MarkovRates};
use crate::tol;

/// Half-width of the semicircle support in shell-energy units.
const SUPPORT_HALF_WIDTH: f64 = 0.5;

/// |t|/(2ħ) below this threshold evaluates J₁(u)/u by series.
const CORRELATOR_SERIES_THRESHOLD: f64 = 1e-4;

/// Allowed departure of an initial Bloch vector from unit norm.
const PURITY_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum GormError {
    #[error("total dimension must be an even integer of at least 4, got {0}")]
    InvalidDimension(usize),
    #[error("coupling strength must be nonnegative and finite")]
    InvalidCoupling,
    #[error("spin frequency must be positive and finite")]
    InvalidFrequency,
    #[error("hbar must be positive and finite")]
    InvalidHbar,
    #[error("shell center must be finite")]
    InvalidShellCenter,
    #[error("shell width must be positive and finite")]
    InvalidShellWidth,
    #[error("coupling scan limit must be positive and finite")]
    InvalidScanLimit,
    #[error("sample has bath dimension {sample}, the model expects {expected}")]
    DimensionMismatch { sample: usize, expected: usize },
    #[error(
        "shell [{lo}, {hi}] contains no bath eigenvalue; the nearest level is at {nearest}"
    )]
    EmptyShell { lo: f64, hi: f64, nearest: f64 },
    #[error("initial state must be pure: Bloch norm {0} is not 1")]
    NotPure(f64),
    #[error("times must be finite, nonnegative, and nondecreasing")]
    InvalidTimeGrid,
    #[error("trajectories differ in length: {left} vs {right}")]
    GridMismatch { left: usize, right: usize },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Spin of frequency ω₀ coupled with strength η to a random-matrix
/// bath of dimension `n_total` / 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GormModel {
    n_total: usize,
    eta: f64,
    omega0: f64,
    hbar: f64,
}

impl GormModel {
    pub fn new(n_total: usize, eta: f64, omega0: f64, hbar: f64) -> Result<Self, GormError> {
        if n_total < 4 || n_total % 2 != 0 {
            return Err(GormError::InvalidDimension(n_total));
        }
        if !eta.is_finite() || eta < 0.0 {
            return Err(GormError::InvalidCoupling);
        }
        if !omega0.is_finite() || omega0 <= 0.0 {
            return Err(GormError::InvalidFrequency);
        }
        if !hbar.is_finite() || hbar <= 0.0 {
            return Err(GormError::InvalidHbar);
        }
        Ok(Self {
            n_total,
            eta,
            omega0,
            hbar,
        })
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Dimension of the bath Hilbert space, half the total.
    pub fn bath_dim(&self) -> usize {
        self.n_total / 2
    }
}

/// Energy shell of bath eigenstates: center ε, full width δε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MicrocanonicalWindow {
    eps: f64,
    delta_eps: f64,
}

impl MicrocanonicalWindow {
    pub fn new(eps: f64, delta_eps: f64) -> Result<Self, GormError> {
        if !eps.is_finite() {
            return Err(GormError::InvalidShellCenter);
        }
        if !delta_eps.is_finite() || delta_eps <= 0.0 {
            return Err(GormError::InvalidShellWidth);
        }
        Ok(Self { eps, delta_eps })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn delta_eps(&self) -> f64 {
        self.delta_eps
    }

    /// Lower shell edge; membership is by closed interval.
    pub fn lo(&self) -> f64 {
        self.eps - 0.5 * self.delta_eps
    }

    /// Upper shell edge; membership is by closed interval.
    pub fn hi(&self) -> f64 {
        self.eps + 0.5 * self.delta_eps
    }
}

/// One draw of the random environment. `hb` is the bath Hamiltonian,
/// already scaled by 1/√(8N); `bmat` is the coupling agent, already
/// scaled by η/√(8N). Both are exactly symmetric by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GoeSample {
    pub hb: DMatrix<f64>,
    pub bmat: DMatrix<f64>,
    pub seed: u64,
}

/// Draws the bath Hamiltonian and the coupling agent from the GOE.
///
/// A single Gaussian stream seeded by `seed` supplies every entry, in a
/// fixed order: first the upper triangle of the bath matrix row by row
/// (diagonal included), then the upper triangle of the coupling agent.
/// Diagonal draws carry standard deviation √2, off-diagonal draws 1;
/// the lower triangles mirror the upper ones, so symmetry is exact and
/// the final scaling is applied exactly once per entry.
pub fn sample_goe(model: &GormModel, seed: u64) -> GoeSample {
    let nb = model.bath_dim();
    let mut stream = GaussianStream::new(seed);
    let scale = 1.0 / (8.0 * model.n_total as f64).sqrt();
    let mut draw_symmetric = |factor: f64| {
        let mut m = DMatrix::zeros(nb, nb);
        for i in 0..nb {
            for j in i..nb {
                let sd = if i == j { std::f64::consts::SQRT_2 } else { 1.0 };
                let value = stream.next_gaussian() * sd * factor;
                m[(i, j)] = value;
                m[(j, i)] = value;
            }
        }
        m
    };
    let hb = draw_symmetric(scale);
    let bmat = draw_symmetric(model.eta * scale);
    GoeSample { hb, bmat, seed }
}

/// Transform of the shell correlator: the semicircle
/// α̃(ε,ω) = (η²ħ/2π)·√(1/4 − (ε+ħω)²), zero outside its support.
pub fn correlator_ft(model: &GormModel, eps: f64, omega: f64) -> f64 {
    let u = eps + model.hbar * omega;
    let radicand = SUPPORT_HALF_WIDTH * SUPPORT_HALF_WIDTH - u * u;
    if radicand <= 0.0 {
        return 0.0;
    }
    model.eta * model.eta * model.hbar / (2.0 * std::f64::consts::PI) * radicand.sqrt()
}

/// Shell correlator α(ε,t) = η²·J₁(t/2ħ)/(4t/ħ)·e^{iεt/ħ} in the limit
/// of a large bath. The t → 0 value η²/16 comes from the series of
/// J₁(u)/u.
pub fn gorm_correlator(model: &GormModel, window: &MicrocanonicalWindow, t: f64) -> Complex64 {
    let u = t / (2.0 * model.hbar);
    let envelope = if u.abs() < CORRELATOR_SERIES_THRESHOLD {
        let u2 = u * u;
        0.5 - u2 / 16.0 + u2 * u2 / 384.0
    } else {
        bessel_j1(u) / u
    };
    let phase = window.eps() * t / model.hbar;
    model.eta * model.eta / 8.0 * envelope * Complex64::new(phase.cos(), phase.sin())
}

/// Damping rate, squared shifted frequency, and stationary inversion
/// for a shell at energy ε. `z_inf` is `None` when both Bohr lines
/// fall outside the semicircle, where Γ = 0 and no stationary
/// inversion is selected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GormRates {
    pub gamma: f64,
    pub omega2: f64,
    pub z_inf: Option<f64>,
}

impl GormRates {
    /// The same numbers in the Bloch-equation form shared by every
    /// model in this crate.
    pub fn bloch_rates(&self) -> MarkovRates {
        MarkovRates {
            gamma: self.gamma,
            omega2: self.omega2,
            z_inf: self.z_inf,
        }
    }
}

/// Markovian rates for a shell at energy ε.
///
/// Γ comes from the semicircle at the two Bohr frequencies. The
/// frequency shift is the principal-value integral
/// (4ω₀²/ħ²)·P∫ α̃(ε,ω)/(ω₀²−ω²) dω taken over the semicircle support,
/// with each pole excised only when it actually lies inside.
pub fn gorm_rates(model: &GormModel, eps: f64) -> Result<GormRates, GormError> {
    if !eps.is_finite() {
        return Err(GormError::InvalidShellCenter);
    }
    let w0 = model.omega0;
    let hbar = model.hbar;
    let half = SUPPORT_HALF_WIDTH;

    let line = |sign: f64| {
        let u = eps + sign * hbar * w0;
        (half * half - u * u).max(0.0).sqrt()
    };
    let gamma = model.eta * model.eta / (2.0 * hbar) * (line(-1.0) + line(1.0));

    let lo = (-half - eps) / hbar;
    let hi = (half - eps) / hbar;
    let integrand = |w: f64| correlator_ft(model, eps, w) / ((w0 - w) * (w0 + w));
    let poles: Vec<f64> = [-w0, w0]
        .into_iter()
        .filter(|p| lo < *p && *p < hi)
        .collect();
    let pv = if poles.is_empty() {
        integrate(integrand, lo, hi, tol::QUAD_REL)?.value
    } else {
        pv_integral(integrand, lo, hi, &poles, tol::PV_REL)?
    };
    let shift = 4.0 * w0 * w0 / (hbar * hbar) * pv;
    let omega2 = w0 * w0 + shift - gamma * gamma;

    let a_plus = correlator_ft(model, eps, w0);
    let a_minus = correlator_ft(model, eps, -w0);
    let weight = a_plus + a_minus;
    let z_inf = if weight > 0.0 {
        Some((a_minus - a_plus) / weight)
    } else {
        None
    };
    Ok(GormRates {
        gamma,
        omega2,
        z_inf,
    })
}

/// Result of the critical-coupling search: either the coupling where
/// Ω² crosses zero, or the statement that no crossing exists at or
/// below the scan limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalCoupling {
    Transition(f64),
    NoTransition,
}

/// Solves Ω²(η) = 0 for the critical coupling at shell energy ε.
///
/// Both Γ and the frequency shift scale exactly as η², so with
/// S = shift(η=1) and G = Γ(η=1) the condition is the quadratic
/// ω₀² + S·x − G²·x² = 0 in x = η². The positive root, when it exists
/// and stays at or below `eta_max`, is the transition.
pub fn eta_critical(
    omega0: f64,
    hbar: f64,
    eps: f64,
    eta_max: f64,
) -> Result<CriticalCoupling, GormError> {
    if !eta_max.is_finite() || eta_max <= 0.0 {
        return Err(GormError::InvalidScanLimit);
    }
    let probe = GormModel::new(4, 1.0, omega0, hbar)?;
    let rates = gorm_rates(&probe, eps)?;
    let g = rates.gamma;
    let s = rates.omega2 + g * g - omega0 * omega0;
    let x = if g > 0.0 {
        let disc = s * s + 4.0 * g * g * omega0 * omega0;
        Some((s + disc.sqrt()) / (2.0 * g * g))
    } else if s < 0.0 {
        Some(-omega0 * omega0 / s)
    } else {
        None
    };
    match x {
        Some(x) if x > 0.0 && x.sqrt() <= eta_max => Ok(CriticalCoupling::Transition(x.sqrt())),
        _ => Ok(CriticalCoupling::NoTransition),
    }
}

/// Full Hamiltonian (ħω₀/2)σ_z ⊗ I + I ⊗ H_B + σ_x ⊗ B in the basis
/// where the first N/2 states carry spin up and the rest spin down.
pub fn build_full_hamiltonian(
    model: &GormModel,
    sample: &GoeSample,
) -> Result<DMatrix<f64>, GormError> {
    let nb = model.bath_dim();
    for m in [&sample.hb, &sample.bmat] {
        if m.nrows() != nb || m.ncols() != nb {
            return Err(GormError::DimensionMismatch {
                sample: m.nrows(),
                expected: nb,
            });
        }
    }
    let n = model.n_total;
    let split = model.hbar * model.omega0 / 2.0;
    let mut h = DMatrix::zeros(n, n);
    for i in 0..nb {
        for j in 0..nb {
            h[(i, j)] = sample.hb[(i, j)];
            h[(nb + i, nb + j)] = sample.hb[(i, j)];
            h[(i, nb + j)] = sample.bmat[(i, j)];
            h[(nb + i, j)] = sample.bmat[(i, j)];
        }
        h[(i, i)] += split;
        h[(nb + i, nb + i)] -= split;
    }
    Ok(h)
}

/// Sum by halving, so the result is independent of how callers might
/// chunk the data and the rounding error stays at the log of the
/// length.
fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => pairwise_sum(&values[..n / 2]) + pairwise_sum(&values[n / 2..]),
    }
}

fn pairwise_mean(values: &[f64]) -> f64 {
    pairwise_sum(values) / values.len() as f64
}

/// Exact shell-averaged Bloch trajectory by full diagonalization.
///
/// Every bath eigenstate inside the closed shell window is paired with
/// the pure spin state of Bloch vector `spin0`, propagated through the
/// eigendecomposition of the full Hamiltonian, and reduced to Pauli
/// expectations; the shell average uses pairwise summation. Each time
/// is an independent evaluation, so the grid resolution carries no
/// integration error.
pub fn exact_evolve(
    model: &GormModel,
    sample: &GoeSample,
    window: &MicrocanonicalWindow,
    spin0: BlochVector,
    times: &[f64],
) -> Result<Vec<BlochVector>, GormError> {
    let norm = spin0.norm();
    if (norm - 1.0).abs() > PURITY_TOL {
        return Err(GormError::NotPure(norm));
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0)
        || times.windows(2).any(|pair| pair[1] < pair[0])
    {
        return Err(GormError::InvalidTimeGrid);
    }

    let nb = model.bath_dim();
    let hamiltonian = build_full_hamiltonian(model, sample)?;
    let bath = symmetric_eig(&sample.hb)?;
    let shell: Vec<usize> = (0..nb)
        .filter(|&k| bath.values[k] >= window.lo() && bath.values[k] <= window.hi())
        .collect();
    if shell.is_empty() {
        let nearest = (0..nb)
            .map(|k| bath.values[k])
            .min_by(|a, b| {
                let da = (a - window.eps()).abs();
                let db = (b - window.eps()).abs();
                da.total_cmp(&db)
            })
            .expect("bath dimension is positive");
        return Err(GormError::EmptyShell {
            lo: window.lo(),
            hi: window.hi(),
            nearest,
        });
    }

    // Spin amplitudes (up, down) of the pure state with this Bloch
    // vector: up is real a, down is b·e^{iφ} with φ the azimuth.
    let a_up = ((1.0 + spin0.z) / 2.0).max(0.0).sqrt();
    let b_down = ((1.0 - spin0.z) / 2.0).max(0.0).sqrt();
    let azimuth = spin0.y.atan2(spin0.x);
    let down_re = b_down * azimuth.cos();
    let down_im = b_down * azimuth.sin();

    let full = symmetric_eig(&hamiltonian)?;
    let m_shell = shell.len();
    let n = model.n_total;
    let mut init_re = DMatrix::zeros(n, m_shell);
    let mut init_im = DMatrix::zeros(n, m_shell);
    for (col, &k) in shell.iter().enumerate() {
        for i in 0..nb {
            let v = bath.vectors[(i, k)];
            init_re[(i, col)] = a_up * v;
            init_re[(nb + i, col)] = down_re * v;
            init_im[(nb + i, col)] = down_im * v;
        }
    }
    let has_imag = down_im != 0.0;

    let coeff_re = full.vectors.transpose() * &init_re;
    let coeff_im = if has_imag {
        Some(full.vectors.transpose() * &init_im)
    } else {
        None
    };

    let mut scaled = DMatrix::zeros(n, m_shell);
    let mut p_re = DMatrix::zeros(n, m_shell);
    let mut q_re = DMatrix::zeros(n, m_shell);
    let mut p_im = DMatrix::zeros(n, m_shell);
    let mut q_im = DMatrix::zeros(n, m_shell);
    let mut xs = vec![0.0; m_shell];
    let mut ys = vec![0.0; m_shell];
    let mut zs = vec![0.0; m_shell];
    let mut trajectory = Vec::with_capacity(times.len());

    let apply_kernel = |out: &mut DMatrix<f64>,
                            coeff: &DMatrix<f64>,
                            scaled: &mut DMatrix<f64>,
                            kernel: &[f64],
                            vectors: &DMatrix<f64>| {
        scaled.copy_from(coeff);
        for (i, &k) in kernel.iter().enumerate() {
            for c in 0..m_shell {
                scaled[(i, c)] *= k;
            }
        }
        out.gemm(1.0, vectors, scaled, 0.0);
    };

    for &t in times {
        let cos_kernel: Vec<f64> = (0..n)
            .map(|i| (full.values[i] * t / model.hbar).cos())
            .collect();
        let sin_kernel: Vec<f64> = (0..n)
            .map(|i| (full.values[i] * t / model.hbar).sin())
            .collect();
        apply_kernel(&mut p_re, &coeff_re, &mut scaled, &cos_kernel, &full.vectors);
        apply_kernel(&mut q_re, &coeff_re, &mut scaled, &sin_kernel, &full.vectors);
        if let Some(ci) = &coeff_im {
            apply_kernel(&mut p_im, ci, &mut scaled, &cos_kernel, &full.vectors);
            apply_kernel(&mut q_im, ci, &mut scaled, &sin_kernel, &full.vectors);
        }

        // psi = p + i q with p = cos·re + sin·im, q = cos·im − sin·re.
        for c in 0..m_shell {
            let mut x = 0.0;
            let mut y = 0.0;
            let mut z = 0.0;
            for i in 0..nb {
                let (pu, qu, pd, qd) = if has_imag {
                    (
                        p_re[(i, c)] + q_im[(i, c)],
                        p_im[(i, c)] - q_re[(i, c)],
                        p_re[(nb + i, c)] + q_im[(nb + i, c)],
                        p_im[(nb + i, c)] - q_re[(nb + i, c)],
                    )
                } else {
                    (
                        p_re[(i, c)],
                        -q_re[(i, c)],
                        p_re[(nb + i, c)],
                        -q_re[(nb + i, c)],
                    )
                };
                x += pu * pd + qu * qd;
                y += pu * qd - qu * pd;
                z += pu * pu + qu * qu - pd * pd - qd * qd;
            }
            xs[c] = 2.0 * x;
            ys[c] = 2.0 * y;
            zs[c] = z;
        }
        trajectory.push(BlochVector {
            x: pairwise_mean(&xs),
            y: pairwise_mean(&ys),
            z: pairwise_mean(&zs),
        });
    }
    Ok(trajectory)
}

/// Componentwise sup-norm and root-mean-square deviation between two
/// trajectories on the same time grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationReport {
    pub sup_x: f64,
    pub sup_y: f64,
    pub sup_z: f64,
    pub rms_x: f64,
    pub rms_y: f64,
    pub rms_z: f64,
}

pub fn compare_exact_redfield(
    exact: &[BlochVector],
    redfield: &[BlochVector],
) -> Result<DeviationReport, GormError> {
    if exact.len() != redfield.len() {
        return Err(GormError::GridMismatch {
            left: exact.len(),
            right: redfield.len(),
        });
    }
    let mut sup = [0.0f64; 3];
    let mut sq = [0.0f64; 3];
    for (e, r) in exact.iter().zip(redfield) {
        let d = [e.x - r.x, e.y - r.y, e.z - r.z];
        for (axis, delta) in d.into_iter().enumerate() {
            sup[axis] = sup[axis].max(delta.abs());
            sq[axis] += delta * delta;
        }
    }
    let n = exact.len().max(1) as f64;
    Ok(DeviationReport {
        sup_x: sup[0],
        sup_y: sup[1],
        sup_z: sup[2],
        rms_x: (sq[0] / n).sqrt(),
        rms_y: (sq[1] / n).sqrt(),
        rms_z: (sq[2] / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{classify, evolve, markov_rates, modes, DampingRegime, SpinModel};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    fn model(n_total: usize, eta: f64) -> GormModel {
        GormModel::new(n_total, eta, 0.01, 1.0).unwrap()
    }

    #[test]
    fn constructor_rejects_bad_inputs() {
        assert!(matches!(
            GormModel::new(5, 0.1, 0.01, 1.0),
            Err(GormError::InvalidDimension(5))
        ));
        assert!(matches!(
            GormModel::new(2, 0.1, 0.01, 1.0),
            Err(GormError::InvalidDimension(2))
        ));
        assert!(GormModel::new(4, -0.1, 0.01, 1.0).is_err());
        assert!(GormModel::new(4, 0.1, 0.0, 1.0).is_err());
        assert!(GormModel::new(4, 0.1, 0.01, 0.0).is_err());
        assert!(MicrocanonicalWindow::new(0.0, 0.0).is_err());
        assert!(MicrocanonicalWindow::new(f64::NAN, 0.1).is_err());
    }

    #[test]
    fn sample_is_deterministic_and_exactly_symmetric() {
        let m = model(40, 0.3);
        let a = sample_goe(&m, 99);
        let b = sample_goe(&m, 99);
        assert_eq!(a.hb, b.hb);
        assert_eq!(a.bmat, b.bmat);
        assert_eq!(a.seed, 99);
        for i in 0..m.bath_dim() {
            for j in 0..m.bath_dim() {
                assert_eq!(a.hb[(i, j)], a.hb[(j, i)]);
                assert_eq!(a.bmat[(i, j)], a.bmat[(j, i)]);
            }
        }
        let c = sample_goe(&m, 100);
        assert_ne!(a.hb, c.hb);
    }

    #[test]
    fn coupling_scales_the_agent_but_not_the_bath() {
        let weak = sample_goe(&model(24, 1.0), 5);
        let strong = sample_goe(&model(24, 2.0), 5);
        assert_eq!(weak.hb, strong.hb);
        for i in 0..12 {
            for j in 0..12 {
                assert_eq!(2.0 * weak.bmat[(i, j)], strong.bmat[(i, j)]);
            }
        }
    }

    #[test]
    fn entry_means_vanish_over_many_seeds() {
        let m = model(8, 1.0);
        let nb = m.bath_dim();
        let samples = 10_000usize;
        let unscale = (8.0 * m.n_total() as f64).sqrt();
        let mut sums = vec![0.0; nb * nb];
        for seed in 0..samples {
            let s = sample_goe(&m, seed as u64);
            for i in 0..nb {
                for j in 0..nb {
                    sums[i * nb + j] += s.hb[(i, j)] * unscale;
                }
            }
        }
        for i in 0..nb {
            for j in i..nb {
                let sd = if i == j { std::f64::consts::SQRT_2 } else { 1.0 };
                let standard_error = sd / (samples as f64).sqrt();
                let mean = sums[i * nb + j] / samples as f64;
                assert!(
                    mean.abs() < 4.0 * standard_error,
                    "entry ({i},{j}) mean {mean} exceeds 4 standard errors"
                );
            }
        }
    }

    #[test]
    fn spectrum_fills_the_semicircle_at_production_scale() {
        // 20 equal bins on [-1/2, 1/2] against the density
        // (8/pi)sqrt(1/4 - x^2); 36.191 is the chi-square point with
        // 19 degrees of freedom at p = 0.01. Level rigidity keeps the
        // statistic far below the independent-count value.
        let m = model(2000, 1.0);
        let sample = sample_goe(&m, 11);
        let eig = symmetric_eig(&sample.hb).unwrap();
        let nb = m.bath_dim();
        let extreme = eig.values[0].abs().max(eig.values[nb - 1].abs());
        assert!(
            (0.475..=0.525).contains(&extreme),
            "edge eigenvalue {extreme}"
        );

        let bins = 20usize;
        let cdf = |x: f64| {
            let x = x.clamp(-0.5, 0.5);
            0.5 + (8.0 / PI) * (x * (0.25 - x * x).max(0.0).sqrt() / 2.0
                + 0.125 * (2.0 * x).asin())
        };
        let mut observed = vec![0usize; bins];
        for k in 0..nb {
            let x = eig.values[k];
            assert!((-0.5..=0.5).contains(&x), "eigenvalue {x} out of support");
            let bin = (((x + 0.5) * bins as f64) as usize).min(bins - 1);
            observed[bin] += 1;
        }
        let mut chi2 = 0.0;
        for b in 0..bins {
            let lo = -0.5 + b as f64 / bins as f64;
            let hi = lo + 1.0 / bins as f64;
            let expected = nb as f64 * (cdf(hi) - cdf(lo));
            let diff = observed[b] as f64 - expected;
            chi2 += diff * diff / expected;
        }
        assert!(chi2 < 36.191, "chi-square {chi2} rejects the semicircle");
    }

    #[test]
    fn correlator_starts_at_the_small_time_limit() {
        let m = model(100, 0.7);
        let w = MicrocanonicalWindow::new(0.0, 0.1).unwrap();
        let at_zero = gorm_correlator(&m, &w, 0.0);
        assert_relative_eq!(at_zero.re, 0.49 / 16.0, max_relative = 1e-14);
        assert_eq!(at_zero.im, 0.0);
        let tiny = gorm_correlator(&m, &w, 1e-9);
        assert_relative_eq!(tiny.re, 0.49 / 16.0, max_relative = 1e-12);
        // Series and direct branches agree at the crossover.
        let below = gorm_correlator(&m, &w, 2.0 * (CORRELATOR_SERIES_THRESHOLD - 1e-9));
        let above = gorm_correlator(&m, &w, 2.0 * (CORRELATOR_SERIES_THRESHOLD + 1e-9));
        assert_relative_eq!(below.re, above.re, max_relative = 1e-9);
    }

    #[test]
    fn correlator_modulus_ignores_the_shell_energy() {
        let m = model(100, 0.5);
        let centered = MicrocanonicalWindow::new(0.0, 0.1).unwrap();
        let shifted = MicrocanonicalWindow::new(0.37, 0.1).unwrap();
        for &t in &[0.3, 1.7, 12.0, 55.0] {
            let a = gorm_correlator(&m, &centered, t).norm();
            let b = gorm_correlator(&m, &shifted, t).norm();
            assert_relative_eq!(a, b, max_relative = 1e-13);
        }
    }

    #[test]
    fn correlator_transform_recovers_the_semicircle() {
        // Trapezoid transform (1/2pi) int alpha(0,t) e^{i w t} dt on a
        // uniform grid: the integrand is bandlimited, so the only
        // error is the t^{-3/2} truncation tail.
        let m = model(100, 0.7);
        let w = MicrocanonicalWindow::new(0.0, 0.1).unwrap();
        let horizon = 10_000.0;
        let step = 0.5;
        let n = (horizon / step) as usize;
        let samples: Vec<f64> = (0..=n)
            .map(|i| gorm_correlator(&m, &w, i as f64 * step).re)
            .collect();
        let peak = m.eta() * m.eta() / (4.0 * PI);
        let mut grid: Vec<f64> = (-9..=9).map(|k| k as f64 * 0.05).collect();
        grid.extend([-0.75, -0.55, 0.55, 0.75]);
        for omega in grid {
            let mut acc = 0.0;
            for (i, &v) in samples.iter().enumerate() {
                let weight = if i == 0 || i == n { 0.5 } else { 1.0 };
                acc += weight * v * (omega * i as f64 * step).cos();
            }
            // Even integrand at eps = 0: twice the half-line integral.
            let transform = acc * step / PI;
            let exact = correlator_ft(&m, 0.0, omega);
            assert_abs_diff_eq!(transform, exact, epsilon = 1e-3 * peak);
        }
    }

    #[test]
    fn rates_match_direct_expressions_inside_the_support() {
        let m = model(100, 0.2);
        let rates = gorm_rates(&m, 0.0).unwrap();
        let expected_gamma = 0.04 * (0.25f64 - 1e-4).sqrt();
        assert_relative_eq!(rates.gamma, expected_gamma, max_relative = 1e-14);
        assert_abs_diff_eq!(rates.gamma, 0.019996, epsilon = 1e-6);
        // Inside the support the shift is exactly 2 eta^2 w0^2.
        let expected_omega2 = 1e-4 + 2.0 * 0.04 * 1e-4 - expected_gamma * expected_gamma;
        assert_relative_eq!(rates.omega2, expected_omega2, max_relative = 1e-9);
        assert_eq!(rates.z_inf, Some(0.0));
    }

    #[test]
    fn rates_vanish_outside_the_support() {
        let m = model(100, 0.2);
        let rates = gorm_rates(&m, 2.0).unwrap();
        assert_eq!(rates.gamma, 0.0);
        assert_eq!(rates.z_inf, None);
        // The off-resonant shift survives: (eta^2 w0 / hbar) times the
        // difference of x - sign(x) sqrt(x^2 - 1/4) at the Bohr lines.
        let g = |x: f64| x - x.signum() * (x * x - 0.25).max(0.0).sqrt();
        let shift = 0.04 * 0.01 * (g(2.01) - g(1.99));
        assert_relative_eq!(
            rates.omega2,
            1e-4 + shift,
            max_relative = 1e-9
        );
    }

    #[test]
    fn generic_quadrature_route_agrees() {
        let m = model(100, 0.15);
        let eps = 0.1;
        let own = gorm_rates(&m, eps).unwrap();
        let spin = SpinModel::new(m.omega0(), m.hbar()).unwrap();
        let generic = markov_rates(&spin, |w| correlator_ft(&m, eps, w)).unwrap();
        assert_relative_eq!(own.gamma, generic.gamma, max_relative = 1e-12);
        assert_relative_eq!(own.omega2, generic.omega2, max_relative = 1e-7);
        assert_relative_eq!(
            own.z_inf.unwrap(),
            generic.z_inf.unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn shift_matches_the_arcsine_reduction_off_support() {
        // Both Bohr lines outside the semicircle: the quadrature must
        // reproduce the closed form of the principal value, frozen
        // from a 30-digit evaluation.
        let m = GormModel::new(100, 0.3, 0.1, 1.0).unwrap();
        let rates = gorm_rates(&m, 1.0).unwrap();
        let shift = rates.omega2 + rates.gamma * rates.gamma - 0.01;
        assert_relative_eq!(shift, -2.8317977782634671e-4, max_relative = 1e-9);

        // The arctan closed form: each pair of arctans sums to pi/2,
        // and the result sits exactly at half the true shift, so it
        // cross-checks the quadrature at a factor of two.
        let half_of = |x: f64| {
            let r = (x * x - 0.25).sqrt();
            let arcs = ((x + 0.5) / r).atan() + ((x - 0.5) / r).atan();
            0.09 * 0.1 * r / PI * arcs
        };
        let printed = 0.09 * 0.01 - half_of(1.1) + half_of(0.9);
        assert_relative_eq!(2.0 * printed, shift, max_relative = 1e-9);

        // Mixed case: one Bohr line inside, one outside.
        let m = GormModel::new(100, 0.25, 0.05, 1.0).unwrap();
        let rates = gorm_rates(&m, -0.48).unwrap();
        let shift = rates.omega2 + rates.gamma * rates.gamma - 0.0025;
        assert_relative_eq!(shift, -2.3682486972646721e-4, max_relative = 1e-8);
    }

    #[test]
    fn frequency_crosses_zero_near_the_documented_coupling() {
        let below = gorm_rates(&model(100, 0.13), 0.0).unwrap();
        let above = gorm_rates(&model(100, 0.15), 0.0).unwrap();
        assert!(below.omega2 > 0.0);
        assert!(above.omega2 < 0.0);
    }

    #[test]
    fn critical_coupling_matches_frozen_values() {
        // At eps = 0 the quadratic solves in closed form to
        // sqrt(2 hbar w0 / (1 - 2 hbar w0)); at w0 = 0.01 that is 1/7.
        match eta_critical(0.01, 1.0, 0.0, 0.3).unwrap() {
            CriticalCoupling::Transition(eta) => {
                assert_relative_eq!(eta, 1.0 / 7.0, max_relative = 1e-8);
            }
            CriticalCoupling::NoTransition => panic!("transition expected"),
        }
        match eta_critical(0.02, 1.0, 0.0, 0.3).unwrap() {
            CriticalCoupling::Transition(eta) => {
                assert_relative_eq!(eta, 0.20412414523193151, max_relative = 1e-8);
            }
            CriticalCoupling::NoTransition => panic!("transition expected"),
        }
        match eta_critical(0.1, 1.0, 0.0, 0.6).unwrap() {
            CriticalCoupling::Transition(eta) => {
                assert_relative_eq!(eta, 0.5, max_relative = 1e-8);
            }
            CriticalCoupling::NoTransition => panic!("transition expected"),
        }
        // The same frequency again, but capped below the root.
        assert_eq!(
            eta_critical(0.1, 1.0, 0.0, 0.3).unwrap(),
            CriticalCoupling::NoTransition
        );
        // Root above the scan limit, and no semicircle overlap at all.
        assert_eq!(
            eta_critical(0.4, 1.0, 0.0, 0.3).unwrap(),
            CriticalCoupling::NoTransition
        );
        assert_eq!(
            eta_critical(0.6, 1.0, 0.0, 10.0).unwrap(),
            CriticalCoupling::NoTransition
        );
    }

    #[test]
    fn full_hamiltonian_is_symmetric_with_shifted_blocks() {
        let m = GormModel::new(12, 0.4, 0.3, 1.0).unwrap();
        let sample = sample_goe(&m, 3);
        let h = build_full_hamiltonian(&m, &sample).unwrap();
        let mut trace = 0.0;
        for i in 0..12 {
            trace += h[(i, i)];
            for j in 0..12 {
                assert_eq!(h[(i, j)], h[(j, i)]);
            }
        }
        let mut bath_trace = 0.0;
        for i in 0..6 {
            bath_trace += sample.hb[(i, i)];
        }
        assert_abs_diff_eq!(trace, 2.0 * bath_trace, epsilon = 1e-14);
    }

    #[test]
    fn decoupled_spectrum_is_the_shifted_bath_spectrum() {
        let m = GormModel::new(16, 0.0, 0.3, 1.0).unwrap();
        let sample = sample_goe(&m, 21);
        let h = build_full_hamiltonian(&m, &sample).unwrap();
        let full = symmetric_eig(&h).unwrap();
        let bath = symmetric_eig(&sample.hb).unwrap();
        let mut expected: Vec<f64> = Vec::new();
        for k in 0..8 {
            expected.push(bath.values[k] + 0.15);
            expected.push(bath.values[k] - 0.15);
        }
        expected.sort_by(f64::total_cmp);
        for k in 0..16 {
            assert_abs_diff_eq!(full.values[k], expected[k], epsilon = 1e-12);
        }
    }

    #[test]
    fn hamiltonian_rejects_a_foreign_sample() {
        let small = sample_goe(&model(8, 0.1), 1);
        let err = build_full_hamiltonian(&model(12, 0.1), &small).unwrap_err();
        assert!(matches!(
            err,
            GormError::DimensionMismatch {
                sample: 4,
                expected: 6
            }
        ));
    }

    #[test]
    fn evolution_returns_the_initial_state_at_time_zero() {
        let m = GormModel::new(16, 0.2, 0.3, 1.0).unwrap();
        let sample = sample_goe(&m, 8);
        let window = MicrocanonicalWindow::new(0.0, 2.0).unwrap();
        let spin0 = BlochVector {
            x: 8.0f64.sqrt() / 3.0,
            y: 0.0,
            z: 1.0 / 3.0,
        };
        let traj = exact_evolve(&m, &sample, &window, spin0, &[0.0]).unwrap();
        assert_abs_diff_eq!(traj[0].x, spin0.x, epsilon = 1e-12);
        assert_abs_diff_eq!(traj[0].y, spin0.y, epsilon = 1e-12);
        assert_abs_diff_eq!(traj[0].z, spin0.z, epsilon = 1e-12);
    }

    #[test]
    fn decoupled_spin_precesses_freely() {
        let m = GormModel::new(16, 0.0, 0.3, 1.0).unwrap();
        let sample = sample_goe(&m, 8);
        let window = MicrocanonicalWindow::new(0.0, 2.0).unwrap();
        let spin0 = BlochVector {
            x: 0.6,
            y: 0.48,
            z: 0.64,
        };
        let times: Vec<f64> = (0..40).map(|i| i as f64 * 0.7).collect();
        let traj = exact_evolve(&m, &sample, &window, spin0, &times).unwrap();
        for (b, &t) in traj.iter().zip(&times) {
            let (s, c) = (0.3 * t).sin_cos();
            assert_abs_diff_eq!(b.x, spin0.x * c - spin0.y * s, epsilon = 1e-10);
            assert_abs_diff_eq!(b.y, spin0.x * s + spin0.y * c, epsilon = 1e-10);
            assert_abs_diff_eq!(b.z, spin0.z, epsilon = 1e-10);
        }
    }

    #[test]
    fn decoupled_exact_and_bloch_solutions_coincide() {
        let m = GormModel::new(20, 0.0, 0.25, 1.0).unwrap();
        let sample = sample_goe(&m, 14);
        let window = MicrocanonicalWindow::new(0.0, 2.0).unwrap();
        let spin0 = BlochVector {
            x: 8.0f64.sqrt() / 3.0,
            y: 0.0,
            z: 1.0 / 3.0,
        };
        let times: Vec<f64> = (0..60).map(|i| i as f64 * 0.4).collect();
        let exact = exact_evolve(&m, &sample, &window, spin0, &times).unwrap();
        let spin = SpinModel::new(0.25, 1.0).unwrap();
        let free = MarkovRates {
            gamma: 0.0,
            omega2: 0.0625,
            z_inf: None,
        };
        let bloch = evolve(&free, &spin, spin0, &times).unwrap();
        let report = compare_exact_redfield(&exact, &bloch).unwrap();
        assert!(report.sup_x < 1e-10);
        assert!(report.sup_y < 1e-10);
        assert!(report.sup_z < 1e-10);
    }

    #[test]
    fn empty_shell_reports_the_nearest_level() {
        let m = GormModel::new(16, 0.2, 0.3, 1.0).unwrap();
        let sample = sample_goe(&m, 8);
        let window = MicrocanonicalWindow::new(10.0, 0.01).unwrap();
        let spin0 = BlochVector {
            x: 0.0,
            y: 0.0,
            z: 1.0,
        };
        match exact_evolve(&m, &sample, &window, spin0, &[0.0]) {
            Err(GormError::EmptyShell { lo, hi, nearest }) => {
                assert_abs_diff_eq!(lo, 9.995, epsilon = 1e-12);
                assert_abs_diff_eq!(hi, 10.005, epsilon = 1e-12);
                assert!(nearest.abs() < 0.6, "nearest level {nearest}");
            }
            other => panic!("expected an empty shell, got {other:?}"),
        }
    }

    #[test]
    fn impure_initial_states_are_refused() {
        let m = GormModel::new(8, 0.2, 0.3, 1.0).unwrap();
        let sample = sample_goe(&m, 8);
        let window = MicrocanonicalWindow::new(0.0, 2.0).unwrap();
        let mixed = BlochVector {
            x: 0.3,
            y: 0.0,
            z: 0.0,
        };
        assert!(matches!(
            exact_evolve(&m, &sample, &window, mixed, &[0.0]),
            Err(GormError::NotPure(_))
        ));
        let pure = BlochVector {
            x: 0.0,
            y: 0.0,
            z: -1.0,
        };
        assert!(exact_evolve(&m, &sample, &window, pure, &[0.0, -1.0]).is_err());
    }

    #[test]
    fn reduced_state_stays_inside_the_bloch_ball() {
        let m = GormModel::new(60, 0.3, 0.1, 1.0).unwrap();
        let sample = sample_goe(&m, 4);
        let window = MicrocanonicalWindow::new(0.1, 0.2).unwrap();
        let spin0 = BlochVector {
            x: 1.0,
            y: 0.0,
            z: 0.0,
        };
        let times: Vec<f64> = (0..80).map(|i| i as f64 * 0.6).collect();
        let traj = exact_evolve(&m, &sample, &window, spin0, &times).unwrap();
        for b in traj {
            assert!(b.norm() <= 1.0 + 1e-9, "norm {}", b.norm());
        }
    }

    #[test]
    fn shell_average_is_insensitive_to_summation_order() {
        let values: Vec<f64> = (0..37)
            .map(|i| ((i * 2654435761u64 as usize) % 1000) as f64 / 500.0 - 1.0)
            .collect();
        let mut rotated = values.clone();
        rotated.rotate_left(17);
        rotated.swap(0, 30);
        let a = pairwise_mean(&values);
        let b = pairwise_mean(&rotated);
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
    }

    #[test]
    fn comparison_requires_matching_grids() {
        let b = BlochVector {
            x: 0.1,
            y: 0.2,
            z: 0.3,
        };
        assert!(matches!(
            compare_exact_redfield(&[b, b], &[b]),
            Err(GormError::GridMismatch { left: 2, right: 1 })
        ));
        let report = compare_exact_redfield(&[b, b], &[b, b]).unwrap();
        assert_eq!(report.sup_x, 0.0);
        assert_eq!(report.sup_y, 0.0);
        assert_eq!(report.sup_z, 0.0);
        assert_eq!(report.rms_z, 0.0);
    }

    #[test]
    fn regime_flips_across_the_critical_coupling() {
        let weak = gorm_rates(&model(100, 0.10), 0.0).unwrap();
        let strong = gorm_rates(&model(100, 0.20), 0.0).unwrap();
        assert_eq!(
            classify(&weak.bloch_rates(), tol::CRITICAL_BAND),
            DampingRegime::Normal
        );
        assert_eq!(
            classify(&strong.bloch_rates(), tol::CRITICAL_BAND),
            DampingRegime::Overdamped
        );
    }

    #[test]
    fn slowest_rate_has_a_cusp_at_the_transition() {
        let slow_rate = |eta: f64| {
            let rates = gorm_rates(&model(100, eta), 0.0).unwrap();
            modes(&rates.bloch_rates()).s3.re.abs()
        };
        let below: Vec<f64> = [0.10, 0.12, 0.14].iter().map(|&e| slow_rate(e)).collect();
        assert!(below[0] < below[1] && below[1] < below[2], "{below:?}");
        let above: Vec<f64> = [0.15, 0.17, 0.20].iter().map(|&e| slow_rate(e)).collect();
        assert!(above[0] > above[1] && above[1] > above[2], "{above:?}");
    }
}
