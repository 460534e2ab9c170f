//! Roots of real monic cubics, with Newton polishing and explicit
//! repeated-root flagging.

use num_complex::Complex64;

/// Roots of s³ + a₂s² + a₁s + a₀.
#[derive(Debug, Clone, Copy)]
pub struct CubicRoots {
    /// The three roots. When exactly one root is real it occupies
    /// index 0 and indices 1, 2 hold the conjugate pair (positive
    /// imaginary part first). When all three are real they are sorted
    /// ascending.
    pub roots: [Complex64; 3],
    /// True when two roots coincide to within the polishing resolution
    /// (1e−6 relative to the root magnitude scale); root values are
    /// still returned but their separation is not trustworthy.
    pub repeated: bool,
}

impl CubicRoots {
    /// True when all three roots are real (conjugate pair absent).
    pub fn all_real(&self) -> bool {
        self.roots.iter().all(|r| r.im == 0.0)
    }
}

fn eval(a2: f64, a1: f64, a0: f64, s: Complex64) -> (Complex64, Complex64) {
    let p = ((s + a2) * s + a1) * s + a0;
    let dp = (3.0 * s + 2.0 * a2) * s + a1;
    (p, dp)
}

fn polish(a2: f64, a1: f64, a0: f64, mut s: Complex64) -> Complex64 {
    // Safeguarded Newton: near a repeated root both p and dp sit at
    // round-off level and a raw step is noise, so a step is accepted
    // only when it reduces the residual.
    for _ in 0..3 {
        let (p, dp) = eval(a2, a1, a0, s);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        let candidate = s - step;
        let (p_candidate, _) = eval(a2, a1, a0, candidate);
        if p_candidate.norm() >= p.norm() {
            break;
        }
        s = candidate;
    }
    s
}

/// Solves the real monic cubic s³ + a₂s² + a₁s + a₀ = 0.
///
/// Conjugate symmetry of a complex pair is enforced exactly. The
/// repeated flag is raised when the minimal root separation falls
/// below 1e−6 of the root magnitude scale.
pub fn cubic_roots(a2: f64, a1: f64, a0: f64) -> CubicRoots {
    // Depressed form t³ + pt + q with s = t − a₂/3.
    let shift = a2 / 3.0;
    let p = a1 - a2 * a2 / 3.0;
    let q = 2.0 * a2.powi(3) / 27.0 - a2 * a1 / 3.0 + a0;

    let discriminant = -4.0 * p.powi(3) - 27.0 * q * q;

    let mut roots: [Complex64; 3];
    if discriminant >= 0.0 && p < 0.0 {
        // Three real roots: trigonometric form.
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        let two_thirds_pi = 2.0 * std::f64::consts::FRAC_PI_3;
        roots = [
            Complex64::new(m * theta.cos() - shift, 0.0),
            Complex64::new(m * (theta - two_thirds_pi).cos() - shift, 0.0),
            Complex64::new(m * (theta + two_thirds_pi).cos() - shift, 0.0),
        ];
    } else if p == 0.0 && q == 0.0 {
        roots = [Complex64::new(-shift, 0.0); 3];
    } else {
        // One real root via Cardano; remaining pair from deflation.
        let half_q = 0.5 * q;
        let inner = half_q * half_q + p.powi(3) / 27.0;
        let t0 = if inner >= 0.0 {
            let root = inner.sqrt();
            let u = (-half_q + root).cbrt();
            let v = (-half_q - root).cbrt();
            u + v
        } else {
            // Negative inner with discriminant < 0 cannot occur for a
            // real cubic; fall back to the trig branch guard value.
            let m = 2.0 * (-p / 3.0).sqrt();
            let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
            m * (arg.acos() / 3.0).cos()
        };
        let real_root = t0 - shift;
        // Deflate: s² + (a₂ + r)s + (a₁ + r(a₂ + r)) with r = real_root.
        let b = a2 + real_root;
        let c = a1 + real_root * b;
        let quarter = b * b - 4.0 * c;
        if quarter >= 0.0 {
            let sq = quarter.sqrt();
            roots = [
                Complex64::new(real_root, 0.0),
                Complex64::new(0.5 * (-b - sq), 0.0),
                Complex64::new(0.5 * (-b + sq), 0.0),
            ];
        } else {
            let sq = (-quarter).sqrt();
            roots = [
                Complex64::new(real_root, 0.0),
                Complex64::new(-0.5 * b, 0.5 * sq),
                Complex64::new(-0.5 * b, -0.5 * sq),
            ];
        }
    }

    for r in roots.iter_mut() {
        *r = polish(a2, a1, a0, *r);
    }

    // Classify: a polished "complex" root with negligible imaginary
    // part collapses to real; otherwise enforce exact conjugacy.
    let scale = roots
        .iter()
        .map(|r| r.norm())
        .fold(1e-30f64, f64::max);
    let mut complex_idx: Vec<usize> = (0..3).filter(|&i| roots[i].im.abs() > 1e-12 * scale).collect();
    if complex_idx.len() == 1 {
        // Polishing asymmetry; treat as real.
        let i = complex_idx.pop().expect("one element");
        roots[i] = Complex64::new(roots[i].re, 0.0);
    }
    let mut out;
    if complex_idx.len() == 2 {
        let i = complex_idx[0];
        let j = complex_idx[1];
        let real_i = (0..3).find(|k| *k != i && *k != j).expect("third index");
        let re = 0.5 * (roots[i].re + roots[j].re);
        let im = 0.5 * (roots[i].im.abs() + roots[j].im.abs());
        out = [
            Complex64::new(roots[real_i].re, 0.0),
            Complex64::new(re, im),
            Complex64::new(re, -im),
        ];
    } else {
        out = [
            Complex64::new(roots[0].re, 0.0),
            Complex64::new(roots[1].re, 0.0),
            Complex64::new(roots[2].re, 0.0),
        ];
        out.sort_by(|x, y| x.re.total_cmp(&y.re));
    }

    let mut min_sep = f64::INFINITY;
    for i in 0..3 {
        for j in (i + 1)..3 {
            min_sep = min_sep.min((out[i] - out[j]).norm());
        }
    }
    CubicRoots {
        roots: out,
        repeated: min_sep <= 1e-6 * scale,
    }
}
