//! Dense eigensolver front ends with contract checks.
//!
//! The symmetric decomposition is delegated to `nalgebra`. The general
//! (non-symmetric) paths run an in-house complex Hessenberg QR
//! iteration with Wilkinson and exceptional shifts: `nalgebra`'s Schur
//! iteration has no exceptional-shift recovery and can cycle forever on
//! skew-symmetric inputs, whose purely imaginary eigenvalue pairs
//! defeat its fixed shift strategy. This module owns the crate-level
//! contract: deterministic eigenvalue order, exact input
//! symmetrization, and residual verification so a silent solver
//! failure cannot leak into physics results.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::NumericsError;
use crate::tol;

/// Dimension cap for the dense general (non-symmetric) eigensolver;
/// callers needing spectra of larger operators must exploit structure.
pub const GENERAL_EIG_MAX_DIM: usize = 64;

/// QR sweep budget per matrix dimension before the solver gives up.
const QR_SWEEPS_PER_DIM: usize = 40;

/// Sweeps without a deflation before an exceptional shift is tried.
const QR_EXCEPTIONAL_PERIOD: usize = 15;

/// Eigendecomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEig {
    /// Eigenvalues in ascending order.
    pub values: DVector<f64>,
    /// Orthonormal eigenvectors, column i pairing with values[i].
    pub vectors: DMatrix<f64>,
    /// Max-norm residual of A·V − V·Λ, scaled by max(1, max|λ|).
    pub residual: f64,
}

/// Full eigendecomposition of a real symmetric matrix.
///
/// The input is symmetrized exactly as (A + Aᵀ)/2 before
/// decomposition; the eigenpairs are sorted ascending; the residual
/// A·V − V·Λ is measured and the call fails if it exceeds the contract
/// bound.
pub fn symmetric_eig(matrix: &DMatrix<f64>) -> Result<SymmetricEig, NumericsError> {
    let n = matrix.nrows();
    if n != matrix.ncols() || n == 0 {
        return Err(NumericsError::EigFailure { dim: n });
    }
    let sym = 0.5 * (matrix + matrix.transpose());
    let decomp = sym.clone().symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| decomp.eigenvalues[i].total_cmp(&decomp.eigenvalues[j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| decomp.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &decomp.eigenvectors.column(src));
    }

    let mut residual_mat = &sym * &vectors;
    for j in 0..n {
        let lambda = values[j];
        for i in 0..n {
            residual_mat[(i, j)] -= lambda * vectors[(i, j)];
        }
    }
    let scale = values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let residual = residual_mat.iter().fold(0.0f64, |acc, v| acc.max(v.abs())) / scale;
    if residual > tol::EIG_RESIDUAL {
        return Err(NumericsError::EigResidual {
            residual,
            bound: tol::EIG_RESIDUAL,
        });
    }
    Ok(SymmetricEig {
        values,
        vectors,
        residual,
    })
}

/// Eigenvalues of a small real (generally non-symmetric) matrix,
/// sorted by real part then imaginary part.
pub fn general_eigenvalues(matrix: &DMatrix<f64>) -> Result<Vec<Complex64>, NumericsError> {
    let n = matrix.nrows();
    if n != matrix.ncols() || n == 0 {
        return Err(NumericsError::EigFailure { dim: n });
    }
    if n > GENERAL_EIG_MAX_DIM {
        return Err(NumericsError::MatrixTooLarge {
            dim: n,
            max: GENERAL_EIG_MAX_DIM,
        });
    }
    let promoted = matrix.map(|v| Complex64::new(v, 0.0));
    let mut out = schur_eigenvalues(promoted)?;
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(out)
}

/// Eigenvalues of a small complex matrix, sorted by real part then
/// imaginary part.
pub fn general_eigenvalues_complex(
    matrix: &DMatrix<Complex64>,
) -> Result<Vec<Complex64>, NumericsError> {
    let n = matrix.nrows();
    if n != matrix.ncols() || n == 0 {
        return Err(NumericsError::EigFailure { dim: n });
    }
    if n > GENERAL_EIG_MAX_DIM {
        return Err(NumericsError::MatrixTooLarge {
            dim: n,
            max: GENERAL_EIG_MAX_DIM,
        });
    }
    let mut out = schur_eigenvalues(matrix.clone())?;
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(out)
}

/// Eigenvalues of a square complex matrix by Householder reduction to
/// Hessenberg form followed by shifted QR iteration. The eigenvalue
/// sum is checked against the trace, which every unitary similarity
/// preserves, so a corrupted iteration cannot return silently.
fn schur_eigenvalues(mut h: DMatrix<Complex64>) -> Result<Vec<Complex64>, NumericsError> {
    let n = h.nrows();
    let trace: Complex64 = (0..n).map(|i| h[(i, i)]).sum();
    hessenberg_in_place(&mut h);
    qr_diagonalize(&mut h)?;
    let eigenvalues: Vec<Complex64> = (0..n).map(|i| h[(i, i)]).collect();
    let sum: Complex64 = eigenvalues.iter().sum();
    let scale = eigenvalues.iter().fold(1.0f64, |acc, e| acc.max(e.norm())) * n as f64;
    let residual = (sum - trace).norm() / scale;
    if residual > tol::EIG_RESIDUAL {
        return Err(NumericsError::EigResidual {
            residual,
            bound: tol::EIG_RESIDUAL,
        });
    }
    Ok(eigenvalues)
}

/// In-place unitary reduction to upper Hessenberg form by Householder
/// reflections on columns 0..n−2.
fn hessenberg_in_place(h: &mut DMatrix<Complex64>) {
    let n = h.nrows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let below: f64 = (k + 2..n).map(|i| h[(i, k)].norm_sqr()).sum();
        if below == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let norm = (x0.norm_sqr() + below).sqrt();
        // alpha = −e^{i arg x0}·‖x‖ keeps v₀ = x₀ − alpha free of
        // cancellation.
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        let mut v = vec![Complex64::new(0.0, 0.0); n - k - 1];
        v[0] = x0 - alpha;
        for i in k + 2..n {
            v[i - k - 1] = h[(i, k)];
        }
        let vnorm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for c in v.iter_mut() {
            *c /= vnorm;
        }
        // Left application of P = I − 2vvᴴ to rows k+1..n; columns
        // before k are already zero in those rows.
        for j in k + 1..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(i, vi)| vi.conj() * h[(k + 1 + i, j)])
                .sum();
            let f = 2.0 * dot;
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, j)] -= f * vi;
            }
        }
        // Right application to columns k+1..n over all rows.
        for i in 0..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(j, vj)| h[(i, k + 1 + j)] * vj)
                .sum();
            let f = 2.0 * dot;
            for (j, vj) in v.iter().enumerate() {
                h[(i, k + 1 + j)] -= f * vj.conj();
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Shifted QR iteration on an upper Hessenberg matrix; on success the
/// diagonal holds the eigenvalues.
fn qr_diagonalize(h: &mut DMatrix<Complex64>) -> Result<(), NumericsError> {
    let n = h.nrows();
    let overall = h.iter().fold(0.0f64, |acc, c| acc.max(c.norm()));
    if overall == 0.0 || n == 1 {
        return Ok(());
    }
    let budget = QR_SWEEPS_PER_DIM * n;
    let mut sweeps = 0usize;
    let mut stalled = 0usize;
    let mut hi = n - 1;
    loop {
        // Split off the largest trailing block with no negligible
        // interior subdiagonal.
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let threshold = f64::EPSILON * if s == 0.0 { overall } else { s };
            if h[(lo, lo - 1)].norm() <= threshold {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            if hi == 0 {
                return Ok(());
            }
            hi -= 1;
            stalled = 0;
            continue;
        }
        if lo + 1 == hi {
            let (e1, e2) = eig2(h[(lo, lo)], h[(lo, hi)], h[(hi, lo)], h[(hi, hi)]);
            h[(lo, lo)] = e1;
            h[(hi, hi)] = e2;
            h[(hi, lo)] = Complex64::new(0.0, 0.0);
            if lo == 0 {
                return Ok(());
            }
            hi = lo - 1;
            stalled = 0;
            continue;
        }
        if sweeps == budget {
            return Err(NumericsError::EigFailure { dim: n });
        }
        sweeps += 1;
        stalled += 1;
        let shift = if stalled % QR_EXCEPTIONAL_PERIOD == 0 {
            // Deterministic restart off the symmetry axis that defeats
            // a cycling shift sequence.
            h[(hi, hi)] + 0.75 * h[(hi, hi - 1)].norm()
        } else {
            wilkinson_shift(h, hi)
        };
        qr_step(h, lo, hi, shift);
    }
}

/// Eigenvalue of the trailing 2×2 block closest to the corner entry.
fn wilkinson_shift(h: &DMatrix<Complex64>, hi: usize) -> Complex64 {
    let corner = h[(hi, hi)];
    let (e1, e2) = eig2(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], corner);
    if (e1 - corner).norm() <= (e2 - corner).norm() {
        e1
    } else {
        e2
    }
}

/// Closed-form eigenvalues of [[a, b], [c, d]]. The square-root branch
/// is chosen so the larger eigenvalue forms without cancellation; the
/// smaller is recovered from the determinant.
fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let mean = 0.5 * (a + d);
    let delta = 0.5 * (a - d);
    let mut z = (delta * delta + b * c).sqrt();
    if (mean.conj() * z).re < 0.0 {
        z = -z;
    }
    let big = mean + z;
    if big.norm() == 0.0 {
        return (mean + z, mean - z);
    }
    let det = a * d - b * c;
    (big, det / big)
}

/// One explicit shifted QR sweep on the active block [lo, hi]: Givens
/// factorization of H − σI, the reversed rotation product from the
/// right, then the shift restored. Entries outside the block do not
/// influence the remaining eigenvalues and stay untouched.
fn qr_step(h: &mut DMatrix<Complex64>, lo: usize, hi: usize, shift: Complex64) {
    for k in lo..=hi {
        h[(k, k)] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let a = h[(k, k)];
        let b = h[(k + 1, k)];
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (c, s) = if r == 0.0 {
            (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
        } else {
            (a / r, b / r)
        };
        for j in k..=hi {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = c.conj() * x + s.conj() * y;
            h[(k + 1, j)] = -s * x + c * y;
        }
        rotations.push((c, s));
    }
    for (idx, (c, s)) in rotations.iter().enumerate() {
        let k = lo + idx;
        // R is upper triangular, so rows below k+1 hold zeros in the
        // rotated columns.
        for i in lo..=(k + 1).min(hi) {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = *c * x + *s * y;
            h[(i, k + 1)] = -s.conj() * x + c.conj() * y;
        }
    }
    for k in lo..=hi {
        h[(k, k)] += shift;
    }
}
