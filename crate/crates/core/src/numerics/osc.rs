//! Oscillatory tail integrals ∫_z^∞ cos(u)/uⁿ du and
//! ∫_z^∞ sin(u)/uⁿ du by the integration-by-parts asymptotic series,
//! intended for z ≥ 30 where the smallest term is ~e^{−z}.
//!
//! The recursions
//!   ∫_z^∞ cos u/uⁿ du = −sin z/zⁿ + n ∫_z^∞ sin u/u^{n+1} du
//!   ∫_z^∞ sin u/uⁿ du =  cos z/zⁿ − n ∫_z^∞ cos u/u^{n+1} du
//! unroll into a divergent asymptotic series truncated at its smallest
//! term; the absolute truncation error is of order e^{−z}·√(2πz),
//! about 1.3e−12 at z = 30 and falling exponentially beyond.

/// Minimum argument for which the asymptotic truncation error is
/// negligible against the leading term.
pub const OSC_TAIL_MIN_Z: f64 = 30.0;

fn tail(n: u32, z: f64, want_cos: bool) -> f64 {
    // Callers often form z as (OSC_TAIL_MIN_Z / t) * t, which can round
    // a hair below the constant; allow that.
    debug_assert!(z >= OSC_TAIL_MIN_Z * (1.0 - 1e-12));
    let (s, c) = z.sin_cos();
    // State: integral of kind `cos` or `sin` with current power m,
    // tracked as sign · size · trig where size = |coefficient|/z^m is
    // free of the oscillating trig factor. The truncation rule must
    // compare sizes, not full terms: the sin/cos boundary factors can
    // differ by an order of magnitude and would otherwise fake
    // divergence long before the genuine turning point near m = z.
    let mut acc = 0.0f64;
    let mut sign = 1.0f64;
    let mut size = z.powi(-(n as i32));
    let mut m = n;
    let mut kind_cos = want_cos;
    let mut prev_size = f64::INFINITY;
    loop {
        if size >= prev_size {
            break;
        }
        let trig = if kind_cos { -s } else { c };
        acc += sign * size * trig;
        prev_size = size;
        if !kind_cos {
            sign = -sign;
        }
        size *= m as f64 / z;
        kind_cos = !kind_cos;
        m += 1;
        if prev_size < 1e-20 * acc.abs().max(1e-30) || m > n + 200 {
            break;
        }
    }
    acc
}

/// ∫_z^∞ cos(u)/uⁿ du for z ≥ [`OSC_TAIL_MIN_Z`], n ≥ 1.
pub fn osc_tail_cos(n: u32, z: f64) -> f64 {
    tail(n, z, true)
}

/// ∫_z^∞ sin(u)/uⁿ du for z ≥ [`OSC_TAIL_MIN_Z`], n ≥ 1.
pub fn osc_tail_sin(n: u32, z: f64) -> f64 {
    tail(n, z, false)
}
