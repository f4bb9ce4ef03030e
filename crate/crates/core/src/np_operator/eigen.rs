//! Dense eigen-decomposition of the (non-Hermitian) Galerkin matrix.
//!
//! Eigenvalues come from a complex Schur form `A = Q T Q*` computed by shifted
//! Hessenberg QR; eigenvectors are recovered by back-substitution on `T`.
//! The continuous operator is symmetrizable, so the imaginary parts of the
//! discrete eigenvalues measure discretization error.

use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::linalg::Hessenberg;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

use super::NpSystem;

/// Imaginary residual above which [`EigenDecomposition::warning`] is set.
pub const SYMMETRIZATION_WARN_IMAG: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Sorted by real part, descending.
    pub values: Vec<Complex64>,
    /// Column `i` is the unit eigenvector of `values[i]` in coefficient space.
    pub vectors: DMatrix<Complex64>,
    pub max_imag: f64,
    pub warning: Option<String>,
}

impl EigenDecomposition {
    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }
}

/// All eigenpairs of the Galerkin matrix.
pub fn eigensolve(system: &NpSystem) -> Result<EigenDecomposition> {
    eigen_dense(&system.matrix)
}

pub(crate) fn eigen_dense(a: &DMatrix<Complex64>) -> Result<EigenDecomposition> {
    let n = a.nrows();
    let scale = a.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let (q, t) = schur(a.clone())?;
    let tiny = f64::EPSILON * scale;

    let mut pairs: Vec<(Complex64, DVector<Complex64>)> = Vec::with_capacity(n);
    for i in 0..n {
        let lam = t[(i, i)];
        // solve (T - lam I) x = 0 with x_i = 1, x_j = 0 for j > i
        let mut x = DVector::<Complex64>::zeros(n);
        x[i] = Complex64::new(1.0, 0.0);
        for j in (0..i).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for m in j + 1..=i {
                s += t[(j, m)] * x[m];
            }
            let mut d = t[(j, j)] - lam;
            if d.norm() < tiny {
                d = Complex64::new(tiny, 0.0);
            }
            x[j] = -s / d;
        }
        let mut v = &q * x;
        let norm = v.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Eigensolver(alloc::format!("degenerate eigenvector {i}")));
        }
        v /= Complex64::new(norm, 0.0);
        pairs.push((lam, v));
    }
    pairs.sort_by(|a, b| b.0.re.total_cmp(&a.0.re));

    let max_imag = pairs.iter().map(|(l, _)| l.im.abs()).fold(0.0, f64::max);
    let mut vectors = DMatrix::<Complex64>::zeros(n, n);
    for (c, (_, v)) in pairs.iter().enumerate() {
        vectors.set_column(c, v);
    }
    let warning = (max_imag > SYMMETRIZATION_WARN_IMAG).then(|| {
        alloc::format!(
            "max |imag| = {max_imag:.3e} exceeds {SYMMETRIZATION_WARN_IMAG:.0e}; \
             the discretization is not resolving the symmetrizable operator"
        )
    });
    Ok(EigenDecomposition {
        values: pairs.into_iter().map(|(l, _)| l).collect(),
        vectors,
        max_imag,
        warning,
    })
}

fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ax = x.norm();
    let r = libm::hypot(ax, y.norm());
    if r == 0.0 {
        (1.0, Complex64::new(0.0, 0.0))
    } else if ax == 0.0 {
        (0.0, Complex64::new(1.0, 0.0))
    } else {
        (ax / r, (x / ax) * y.conj() / r)
    }
}

// eigenvalue of the trailing 2x2 block closest to its last diagonal entry
fn wilkinson(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let p = (a - d) * 0.5;
    let disc = (p * p + b * c).sqrt();
    let den = if (p + disc).norm() >= (p - disc).norm() { p + disc } else { p - disc };
    if den.norm() == 0.0 {
        d
    } else {
        d - b * c / den
    }
}

/// Complex Schur form by single-shift QR on the Hessenberg reduction.
///
/// Subdiagonals are deflated against either their diagonal neighbours or the
/// norm of the matrix. The second test is what lets clusters of (nearly)
/// equal eigenvalues converge.
fn schur(a: DMatrix<Complex64>) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    let n = a.nrows();
    let zero = Complex64::new(0.0, 0.0);
    let (mut q, mut h) = Hessenberg::new(a).unpack();
    for j in 0..n {
        for i in j + 2..n {
            h[(i, j)] = zero;
        }
    }
    let eps = f64::EPSILON;
    let hnorm = h.norm();
    let max_iter = 30 * n.max(10);
    let mut hi = n;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 1 {
        let mut l = hi - 1;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let local = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if sub <= eps * local || sub <= eps * hnorm {
                h[(l, l - 1)] = zero;
                break;
            }
            l -= 1;
        }
        if l == hi - 1 {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_iter {
            return Err(Error::Eigensolver("QR iteration did not converge".into()));
        }
        let m = hi - 1;
        let mu = if iter.is_multiple_of(10) {
            h[(m, m)] + h[(m, m - 1)].norm() * 0.75
        } else {
            wilkinson(h[(m - 1, m - 1)], h[(m - 1, m)], h[(m, m - 1)], h[(m, m)])
        };
        for k in l..m {
            let (x, y) = if k == l {
                (h[(l, l)] - mu, h[(l + 1, l)])
            } else {
                (h[(k, k - 1)], h[(k + 1, k - 1)])
            };
            let (c, s) = givens(x, y);
            for j in k.saturating_sub(1).max(l)..n {
                let (u, v) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = u * c + s * v;
                h[(k + 1, j)] = v * c - s.conj() * u;
            }
            for i in 0..=(k + 2).min(m) {
                let (u, v) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = u * c + v * s.conj();
                h[(i, k + 1)] = v * c - u * s;
            }
            for i in 0..n {
                let (u, v) = (q[(i, k)], q[(i, k + 1)]);
                q[(i, k)] = u * c + v * s.conj();
                q[(i, k + 1)] = v * c - u * s;
            }
            if k > l {
                h[(k + 1, k - 1)] = zero;
            }
        }
    }
    Ok((q, h))
}
