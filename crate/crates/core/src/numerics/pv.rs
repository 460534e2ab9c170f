//! Principal-value integrals through simple poles.
//!
//! The integral is computed with symmetric windows of half-width w
//! excised around every pole. For a simple pole the windowed result
//! differs from the principal value by an odd power series
//! c₁w + c₃w³ + c₅w⁵ + ..., so evaluating at w, w/2, ..., w/16 and
//! extrapolating removes the terms through w⁷, leaving an O(w⁹)
//! residual. The expansion only converges while w stays inside the
//! analyticity radius of (x−p)·f around each pole, which the caller
//! cannot be expected to know; the ladder therefore carries its own
//! error estimate and the whole construction restarts with a smaller
//! outer window until the estimate meets the tolerance. The window
//! strips on both sides of a pole are integrated as a single folded
//! integrand f(p+u) + f(p−u), which is bounded near the pole and avoids
//! catastrophic cancellation.

use super::quad::{integrate, integrate_to_infinity, integrate_with_abs};
use super::NumericsError;
use crate::tol;

/// Fraction of the maximal admissible half-width used for the outermost
/// window of the first attempt.
const WINDOW_SAFETY: f64 = 0.4;

/// Richardson levels: windows w, w/2, w/4, w/8, w/16.
const LEVELS: usize = 5;

/// Window-shrink attempts; each divides the outer window by 4.
const MAX_ATTEMPTS: usize = 6;

/// Principal value of ∫_a^b f(x) dx where `f` has simple poles at the
/// given locations, each strictly inside (a, b).
pub fn pv_integral(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    poles: &[f64],
    rel_tol: f64,
) -> Result<f64, NumericsError> {
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(NumericsError::BadInterval { a, b });
    }
    let mut ps = poles.to_vec();
    ps.sort_by(f64::total_cmp);
    for &p in &ps {
        if !(p > a && p < b) {
            return Err(NumericsError::PoleOutsideInterval { pole: p, a, b });
        }
    }
    if ps.is_empty() {
        return Ok(integrate(&mut f, a, b, rel_tol)?.value);
    }

    // Maximal half-width keeping all windows disjoint and interior.
    let mut w_max = f64::INFINITY;
    for (i, &p) in ps.iter().enumerate() {
        w_max = w_max.min(p - a).min(b - p);
        if i + 1 < ps.len() {
            let sep = ps[i + 1] - p;
            if sep <= 0.0 {
                return Err(NumericsError::PolesTooClose {
                    p0: p,
                    p1: ps[i + 1],
                    window: 0.0,
                });
            }
            w_max = w_max.min(0.5 * sep);
        }
    }
    let w_top = WINDOW_SAFETY * w_max;
    if !(w_top > 0.0) || w_top < 1e3 * f64::EPSILON * (b - a) {
        return Err(NumericsError::PolesTooClose {
            p0: ps[0],
            p1: *ps.last().expect("nonempty"),
            window: w_top,
        });
    }

    let mut w0 = w_top;
    let mut best_achieved = f64::INFINITY;
    let mut best_target = 0.0;
    for _ in 0..MAX_ATTEMPTS {
        if w0 < 1e3 * f64::EPSILON * (b - a) {
            break;
        }
        let (value, est, mag) = window_ladder(&mut f, a, b, &ps, w0, rel_tol)?;
        let target = (rel_tol * value.abs())
            .max(100.0 * f64::EPSILON * mag)
            .max(tol::QUAD_ABS_FLOOR);
        if est <= target {
            return Ok(value);
        }
        if est < best_achieved {
            best_achieved = est;
            best_target = target;
        }
        w0 *= 0.25;
    }
    Err(NumericsError::PrincipalValueNonConvergence {
        achieved: best_achieved,
        requested: best_target,
    })
}

/// One extrapolation ladder at outer half-width `w0`.
///
/// Returns (extrapolated value, error estimate, magnitude scale). The
/// error estimate is the difference between the two highest
/// extrapolation orders, the size of the leading term the final stage
/// removed; it is conservative when the expansion converges and large
/// when it does not.
fn window_ladder(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    ps: &[f64],
    w0: f64,
    rel_tol: f64,
) -> Result<(f64, f64, f64), NumericsError> {
    // Base integral over the complement of the outermost windows.
    let mut base = 0.0;
    let mut left = a;
    for &p in ps {
        if p - w0 > left {
            base += integrate(&mut *f, left, p - w0, rel_tol)?.value;
        }
        left = p + w0;
    }
    if b > left {
        base += integrate(&mut *f, left, b, rel_tol)?.value;
    }

    // Window refinements: i_levels[l] approximates the integral with
    // windows of half-width w0/2^l excised. The strips between
    // consecutive windows are near-cancelling for near-odd integrands,
    // so they carry an absolute target scaled to the running magnitude.
    let mut i_levels = [0.0f64; LEVELS];
    i_levels[0] = base;
    let mut mag = base.abs();
    for l in 1..LEVELS {
        let outer = w0 / (1 << (l - 1)) as f64;
        let inner = 0.5 * outer;
        let abs_tol = (rel_tol * mag).max(tol::QUAD_ABS_FLOOR);
        let mut strips = 0.0;
        for &p in ps {
            let folded = |u: f64| f(p + u) + f(p - u);
            strips += integrate_with_abs(folded, inner, outer, rel_tol, abs_tol)?.value;
        }
        i_levels[l] = i_levels[l - 1] + strips;
        mag = mag.max(i_levels[l].abs());
    }

    // Richardson elimination of the odd window-size powers.
    let r1: Vec<f64> = (0..LEVELS - 1)
        .map(|l| 2.0 * i_levels[l + 1] - i_levels[l])
        .collect();
    let r2: Vec<f64> = (0..r1.len() - 1)
        .map(|l| (8.0 * r1[l + 1] - r1[l]) / 7.0)
        .collect();
    let r3: Vec<f64> = (0..r2.len() - 1)
        .map(|l| (32.0 * r2[l + 1] - r2[l]) / 31.0)
        .collect();
    let r4: Vec<f64> = (0..r3.len() - 1)
        .map(|l| (128.0 * r3[l + 1] - r3[l]) / 127.0)
        .collect();
    let value = *r4.last().expect("at least one extrapolant");
    let est = (value - *r3.last().expect("nonempty")).abs();
    Ok((value, est, mag))
}

/// Principal value of ∫_{−∞}^{∞} f(x) dx with simple poles inside
/// (−half_width, half_width); the tails beyond ±half_width are mapped
/// to finite panels and must be pole-free and absolutely convergent.
pub fn pv_integral_real_line(
    mut f: impl FnMut(f64) -> f64,
    poles: &[f64],
    half_width: f64,
    rel_tol: f64,
) -> Result<f64, NumericsError> {
    for &p in poles {
        if p.abs() >= 0.9 * half_width {
            return Err(NumericsError::PoleOutsideInterval {
                pole: p,
                a: -half_width,
                b: half_width,
            });
        }
    }
    let core = pv_integral(&mut f, -half_width, half_width, poles, rel_tol)?;
    let upper = integrate_to_infinity(&mut f, half_width, rel_tol)?.value;
    let lower = integrate_to_infinity(|t| f(-t), half_width, rel_tol)?.value;
    Ok(core + upper + lower)
}
