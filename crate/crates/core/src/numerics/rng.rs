//! Deterministic Gaussian stream: a SplitMix64 counter generator with a
//! Box–Muller transform. Bit-reproducible for a fixed seed on any
//! platform and thread layout; the generator is documented here in full
//! so samples can be regenerated outside this crate.

/// Stream of standard-normal variates seeded by a 64-bit token.
///
/// Internals: the state advances by the golden-ratio increment
/// 0x9E3779B97F4A7C15 and is mixed by the SplitMix64 finalizer; the top
/// 53 bits of each output, offset by half a ulp, give a uniform in the
/// open interval (0, 1); uniform pairs feed a polar-form-free
/// Box–Muller transform producing two normals per two uniforms.
#[derive(Debug, Clone)]
pub struct GaussianStream {
    state: u64,
    cached: Option<f64>,
}

impl GaussianStream {
    /// Creates a stream; equal seeds yield identical draw sequences.
    pub fn new(seed: u64) -> Self {
        Self {
            state: seed,
            cached: None,
        }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform variate in the open interval (0, 1).
    pub fn next_uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard-normal variate.
    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(v) = self.cached.take() {
            return v;
        }
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        let (s, c) = theta.sin_cos();
        self.cached = Some(r * s);
        r * c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_replay() {
        let mut a = GaussianStream::new(42);
        let mut b = GaussianStream::new(42);
        for _ in 0..1000 {
            assert_eq!(a.next_gaussian(), b.next_gaussian());
        }
    }

    #[test]
    fn moments_of_one_million_draws() {
        let mut g = GaussianStream::new(7);
        let n = 1_000_000usize;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let x = g.next_gaussian();
            sum += x;
            sum_sq += x * x;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.004, "mean {mean}");
        assert!((0.994..=1.006).contains(&var), "variance {var}");
    }

    #[test]
    fn independent_seeds_are_uncorrelated() {
        let mut a = GaussianStream::new(1);
        let mut b = GaussianStream::new(2);
        let n = 100_000usize;
        let mut dot = 0.0;
        for _ in 0..n {
            dot += a.next_gaussian() * b.next_gaussian();
        }
        let r = dot / n as f64;
        assert!(r.abs() < 0.01, "cross-correlation {r}");
    }

    #[test]
    fn lag_one_autocorrelation_vanishes() {
        let mut g = GaussianStream::new(11);
        let n = 1_000_000usize;
        let mut prev = g.next_gaussian();
        let mut dot = 0.0;
        for _ in 0..n {
            let x = g.next_gaussian();
            dot += prev * x;
            prev = x;
        }
        let r = dot / n as f64;
        assert!(r.abs() < 0.005, "lag-1 autocorrelation {r}");
    }

    #[test]
    fn uniforms_stay_inside_open_interval() {
        let mut g = GaussianStream::new(0);
        for _ in 0..100_000 {
            let u = g.next_uniform();
            assert!(u > 0.0 && u < 1.0);
        }
    }
}
