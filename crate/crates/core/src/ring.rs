//! Particle on an N-site ring with site-local white-noise dephasing:
//! weak-coupling generator, Bloch-sector decomposition, the diffusive
//! branch with its critical coupling, and the high-temperature mapping
//! onto the oscillator-bath coupling constant.
//!
//! Site-local coupling agents with correlation 2Qδ(τ)δ_{ll'} collapse
//! the weak-coupling double-commutator dissipator to pure dephasing:
//! beside the commutator with the hopping Hamiltonian, dρ_{ll'}/dt
//! picks up −(2Q/ħ²)(1−δ_{ll'})ρ_{ll'}, and the on-site energy E₀
//! cancels. Translation invariance splits the generator into N Bloch
//! sectors: with ρ_{l,l'} = e^{iql} g(l−l'), q = 2πn/N, the coherence
//! offset r = l−l' evolves by
//!
//!   dg(r)/dt = (2A/ħ) sin(q/2) [e^{−iq/2} g(r−1) − e^{iq/2} g(r+1)]
//!              − (2Q/ħ²)(1−δ_{r0}) g(r),
//!
//! with g periodic in r. The diagonal gauge f(r) = e^{iqr/2} g(r)
//! makes the sector real at the price of a (−1)ⁿ twist on the wrap
//! entries, so every sector spectrum is closed under conjugation.
//!
//! For coupling beyond 2ħA sin(q/2), one sector eigenvalue separates
//! from the dephasing cluster near −2Q/ħ² as a real "diffusive" mode
//! bound to the dephasing-free offset r = 0. Its closed form
//! s = −(2Q/ħ²)(1 − √(1 − (2ħA sin(q/2)/Q)²)) is the large-N limit;
//! finite rings approach it exponentially fast as the bound state
//! localizes.

use num_complex::Complex64;
use thiserror::Error;

use nalgebra::DMatrix;

use crate::bath::{correlator_ft_zero_limit, BathSpec, ThermalState};
use crate::numerics::{general_eigenvalues_complex, NumericsError};

/// Largest site count accepted by the dense full-generator oracle.
const MAX_FULL_SITES: usize = 12;

#[derive(Debug, Error)]
pub enum RingError {
    #[error("ring needs at least 2 sites, got {requested}")]
    TooFewSites { requested: usize },
    #[error("full generator is limited to {max} sites, got {requested}")]
    TooManySites { requested: usize, max: usize },
    #[error("hopping amplitude must be positive and finite")]
    InvalidHop,
    #[error("on-site energy must be finite")]
    InvalidEnergy,
    #[error("hbar must be positive and finite")]
    InvalidHbar,
    #[error("dephasing strength must be nonnegative and finite")]
    InvalidStrength,
    #[error("sector index {requested} outside 1..={n_sites}")]
    InvalidSector { requested: usize, n_sites: usize },
    #[error("Bloch number {q} outside [0, 2pi]")]
    InvalidBlochNumber { q: f64 },
    #[error("diffusive branch absent below coupling {threshold}")]
    BranchAbsent { threshold: f64 },
    #[error("spectra have different sizes")]
    MismatchedSpectra,
    #[error("spectral gap {gap:.3e} exceeds the tracking limit {limit:.3e}")]
    TrackingDiscontinuous { gap: f64, limit: f64 },
    #[error("sector spectrum violates its structural invariants beyond round-off")]
    SolverFailure,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// N-site ring with nearest-neighbor hopping amplitude A and on-site
/// energy E₀ (a pure spectral offset that cancels in the generator).
#[derive(Debug, Clone, Copy)]
pub struct LoopModel {
    n_sites: usize,
    hop: f64,
    e0: f64,
    hbar: f64,
}

impl LoopModel {
    pub fn new(n_sites: usize, hop: f64, e0: f64, hbar: f64) -> Result<Self, RingError> {
        if n_sites < 2 {
            return Err(RingError::TooFewSites { requested: n_sites });
        }
        if !(hop > 0.0 && hop.is_finite()) {
            return Err(RingError::InvalidHop);
        }
        if !e0.is_finite() {
            return Err(RingError::InvalidEnergy);
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(RingError::InvalidHbar);
        }
        Ok(Self {
            n_sites,
            hop,
            e0,
            hbar,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn hop(&self) -> f64 {
        self.hop
    }

    pub fn e0(&self) -> f64 {
        self.e0
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Bloch number q = 2πn/N of sector n.
    pub fn bloch_q(&self, n: usize) -> f64 {
        2.0 * std::f64::consts::PI * n as f64 / self.n_sites as f64
    }
}

/// White-noise dephasing strength Q (units of ħ² times a rate).
#[derive(Debug, Clone, Copy)]
pub struct DephasingBath {
    q_strength: f64,
}

impl DephasingBath {
    pub fn new(q_strength: f64) -> Result<Self, RingError> {
        if !(q_strength >= 0.0 && q_strength.is_finite()) {
            return Err(RingError::InvalidStrength);
        }
        Ok(Self { q_strength })
    }

    pub fn q_strength(&self) -> f64 {
        self.q_strength
    }
}

/// Spectrum of one Bloch sector, sorted by (Re, Im) ascending.
#[derive(Debug, Clone)]
pub struct SectorSpectrum {
    pub bloch_q: f64,
    pub eigenvalues: Vec<Complex64>,
    /// The separated real diffusive eigenvalue, present when the
    /// coupling exceeds 2ħA sin(q/2).
    pub diffusive: Option<f64>,
    /// Index of the diffusive eigenvalue in `eigenvalues`.
    pub diffusive_index: Option<usize>,
}

fn hamiltonian(model: &LoopModel) -> DMatrix<f64> {
    let n = model.n_sites;
    let mut h = DMatrix::zeros(n, n);
    for l in 0..n {
        h[(l, l)] = model.e0;
        // At N = 2 both bonds join the same pair of sites, so the hop
        // entries accumulate.
        h[(l, (l + 1) % n)] += -model.hop;
        h[(l, (l + n - 1) % n)] += -model.hop;
    }
    h
}

/// Dense generator of dρ_{ll'}/dt = −(i/ħ)[H,ρ]_{ll'}
/// − (2Q/ħ²)(1−δ_{ll'})ρ_{ll'} on row-major vectorized ρ, for
/// small-ring oracle use only.
pub fn build_full_generator(
    model: &LoopModel,
    bath: &DephasingBath,
) -> Result<DMatrix<Complex64>, RingError> {
    let n = model.n_sites;
    if n > MAX_FULL_SITES {
        return Err(RingError::TooManySites {
            requested: n,
            max: MAX_FULL_SITES,
        });
    }
    let h = hamiltonian(model);
    let dephase = 2.0 * bath.q_strength / (model.hbar * model.hbar);
    let unit = Complex64::new(0.0, -1.0 / model.hbar);
    let mut gen = DMatrix::<Complex64>::zeros(n * n, n * n);
    for l in 0..n {
        for lp in 0..n {
            let row = l * n + lp;
            for m in 0..n {
                // −(i/ħ) (Hρ)_{ll'} term.
                gen[(row, m * n + lp)] += unit * h[(l, m)];
                // +(i/ħ) (ρH)_{ll'} term.
                gen[(row, l * n + m)] -= unit * h[(m, lp)];
            }
            if l != lp {
                gen[(row, row)] -= Complex64::new(dephase, 0.0);
            }
        }
    }
    Ok(gen)
}

/// All N² eigenvalues of the full generator, sorted by (Re, Im).
pub fn full_spectrum(
    model: &LoopModel,
    bath: &DephasingBath,
) -> Result<Vec<Complex64>, RingError> {
    let gen = build_full_generator(model, bath)?;
    Ok(general_eigenvalues_complex(&gen)?)
}

/// Complex sector matrix of Bloch number q = 2πn/N in the one-sided
/// phase convention ρ_{l,l'} = e^{iql} g(l−l'), acting on g.
pub fn build_sector(
    model: &LoopModel,
    bath: &DephasingBath,
    n: usize,
) -> Result<DMatrix<Complex64>, RingError> {
    check_sector(model, n)?;
    let sites = model.n_sites;
    let q = model.bloch_q(n);
    let c = 2.0 * model.hop * (0.5 * q).sin() / model.hbar;
    let dephase = 2.0 * bath.q_strength / (model.hbar * model.hbar);
    let phase = Complex64::new(0.0, 0.5 * q).exp();
    let mut m = DMatrix::<Complex64>::zeros(sites, sites);
    for r in 0..sites {
        m[(r, (r + sites - 1) % sites)] += phase.conj() * c;
        m[(r, (r + 1) % sites)] -= phase * c;
        if r != 0 {
            m[(r, r)] -= Complex64::new(dephase, 0.0);
        }
    }
    Ok(m)
}

fn check_sector(model: &LoopModel, n: usize) -> Result<(), RingError> {
    if n == 0 || n > model.n_sites {
        return Err(RingError::InvalidSector {
            requested: n,
            n_sites: model.n_sites,
        });
    }
    Ok(())
}

fn closed_form_diffusive(model: &LoopModel, bath: &DephasingBath, q: f64) -> f64 {
    let threshold = 2.0 * model.hbar * model.hop * (0.5 * q).sin();
    if bath.q_strength == 0.0 {
        return 0.0;
    }
    let x = threshold / bath.q_strength;
    let hbar_sq = model.hbar * model.hbar;
    -(2.0 * bath.q_strength / hbar_sq) * x * x / (1.0 + (1.0 - x * x).max(0.0).sqrt())
}

/// Eigenvalues of sector n, with the diffusive eigenvalue identified
/// when the coupling exceeds 2ħA sin(q/2): the real eigenvalue nearest
/// the large-N closed form, separated from the dephasing cluster.
pub fn sector_spectrum(
    model: &LoopModel,
    bath: &DephasingBath,
    n: usize,
) -> Result<SectorSpectrum, RingError> {
    check_sector(model, n)?;
    let q = model.bloch_q(n);
    let eigenvalues = general_eigenvalues_complex(&build_sector(model, bath, n)?)?;
    let scale = eigenvalues
        .iter()
        .map(|z| z.norm())
        .fold(1.0f64, f64::max);
    for z in &eigenvalues {
        if z.re > 1e-10 * scale {
            return Err(RingError::SolverFailure);
        }
        let has_conjugate = eigenvalues
            .iter()
            .any(|w| (w - z.conj()).norm() <= 1e-10 * scale);
        if !has_conjugate {
            return Err(RingError::SolverFailure);
        }
    }
    let threshold = 2.0 * model.hbar * model.hop * (0.5 * q).sin();
    let mut diffusive = None;
    let mut diffusive_index = None;
    if bath.q_strength > threshold {
        let target = closed_form_diffusive(model, bath, q);
        let candidate = eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, z)| z.im.abs() <= 1e-8 * scale)
            .min_by(|(_, a), (_, b)| {
                (a.re - target).abs().total_cmp(&(b.re - target).abs())
            });
        if let Some((idx, z)) = candidate {
            diffusive = Some(z.re);
            diffusive_index = Some(idx);
        }
    }
    Ok(SectorSpectrum {
        bloch_q: q,
        eigenvalues,
        diffusive,
        diffusive_index,
    })
}

/// All N sector spectra, assembled in sector order n = 1..=N. Sectors
/// are independent, so this map parallelizes without reordering.
pub fn sector_spectra(
    model: &LoopModel,
    bath: &DephasingBath,
) -> Result<Vec<SectorSpectrum>, RingError> {
    (1..=model.n_sites)
        .map(|n| sector_spectrum(model, bath, n))
        .collect()
}

/// Large-N diffusive eigenvalue
/// s = −(2Q/ħ²)(1 − √(1 − (2ħA sin(q/2)/Q)²)), defined for couplings
/// at or above the branch point 2ħA sin(q/2).
pub fn diffusive_eigenvalue(
    model: &LoopModel,
    bath: &DephasingBath,
    q: f64,
) -> Result<f64, RingError> {
    if !(q.is_finite() && (0.0..=2.0 * std::f64::consts::PI).contains(&q)) {
        return Err(RingError::InvalidBlochNumber { q });
    }
    let threshold = 2.0 * model.hbar * model.hop * (0.5 * q).sin();
    if bath.q_strength < threshold {
        return Err(RingError::BranchAbsent { threshold });
    }
    Ok(closed_form_diffusive(model, bath, q))
}

/// Critical coupling Q_c = 2ħA sin(π/N): the smallest dephasing
/// strength at which any sector (the n = 1 one) develops a diffusive
/// eigenvalue.
pub fn q_critical(model: &LoopModel) -> f64 {
    2.0 * model.hbar * model.hop * (std::f64::consts::PI / model.n_sites as f64).sin()
}

/// Diffusive eigenvalue with the dephasing strength taken from an
/// oscillator bath at high temperature: Q = π·α̃(0) = κ/β, the
/// white-noise strength matching the bath's zero-frequency correlator
/// limit. Zero temperature gives Q = 0 and hence no branch.
pub fn dispersion_high_t(
    model: &LoopModel,
    spec: &BathSpec,
    temp: &ThermalState,
    q: f64,
) -> Result<f64, RingError> {
    let strength = std::f64::consts::PI * correlator_ft_zero_limit(spec, temp);
    let bath = DephasingBath::new(strength)?;
    diffusive_eigenvalue(model, &bath, q)
}

/// Pairs each eigenvalue of `previous` with its nearest unused partner
/// in `current` (ties broken toward the smaller real part), for
/// tracking branches across a coupling sweep. A pairing farther than
/// `max_jump` means the sweep step is too coarse to follow continuity.
pub fn match_spectra(
    previous: &[Complex64],
    current: &[Complex64],
    max_jump: f64,
) -> Result<Vec<usize>, RingError> {
    if previous.len() != current.len() {
        return Err(RingError::MismatchedSpectra);
    }
    let mut used = vec![false; current.len()];
    let mut pairing = Vec::with_capacity(previous.len());
    for p in previous {
        let best = current
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .min_by(|(_, a), (_, b)| {
                (*a - p)
                    .norm()
                    .total_cmp(&(*b - p).norm())
                    .then(a.re.total_cmp(&b.re))
            })
            .map(|(j, z)| (j, (z - p).norm()))
            .expect("equal lengths leave a candidate");
        if best.1 > max_jump {
            return Err(RingError::TrackingDiscontinuous {
                gap: best.1,
                limit: max_jump,
            });
        }
        used[best.0] = true;
        pairing.push(best.0);
    }
    Ok(pairing)
}
