//! Cyclic Jacobi eigensolver for small complex Hermitian matrices, and the
//! spectral matrix functions built on it.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 64;

/// Eigenvalues below this (in absolute value) are treated as numerical zeros
/// when a matrix is asserted positive semidefinite.
pub const PSD_CLIP: f64 = 1e-10;

/// Spectral decomposition `M = V diag(λ) V†` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in eigenvalue order.
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// `V f(diag(λ)) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let fl = f(lambda);
            if fl == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = v[(i, k)] * fl;
                for j in 0..n {
                    out[(i, j)] += vi * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|l| l)
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.column(k)
    }
}

fn check_hermitian(m: &ComplexMatrix, tol: f64) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let asymmetry = m.hermitian_asymmetry();
    if asymmetry > tol {
        return Err(Error::NotHermitian { asymmetry, tol });
    }
    Ok(())
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Runs cyclic Jacobi sweeps on a Hermitian matrix, optionally accumulating
/// the eigenvectors. Returns unsorted eigenvalues.
fn jacobi(mut a: ComplexMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<ComplexMatrix>)> {
    let n = a.rows();
    let mut v = want_vectors.then(|| ComplexMatrix::identity(n));
    let scale = a.frobenius_norm();
    if n <= 1 || scale == 0.0 {
        let evals = (0..n).map(|i| a[(i, i)].re).collect();
        return Ok((evals, v));
    }
    let threshold = 1e-15 * scale;

    let mut sweeps = 0;
    while off_diagonal_norm(&a) > threshold {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let abs = apq.norm();
                if abs == 0.0 {
                    continue;
                }
                let phase = apq / abs;
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * abs);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G restricted to (p, q): [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
                let g_pp = Complex64::new(c, 0.0);
                let g_pq = Complex64::new(s, 0.0);
                let g_qp = -phase.conj() * s;
                let g_qq = phase.conj() * c;

                // A <- A G
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * g_pp + aiq * g_qp;
                    a[(i, q)] = aip * g_pq + aiq * g_qq;
                }
                // A <- G† A
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = g_pp.conj() * apj + g_qp.conj() * aqj;
                    a[(q, j)] = g_pq.conj() * apj + g_qq.conj() * aqj;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

                if let Some(v) = v.as_mut() {
                    for i in 0..n {
                        let vip = v[(i, p)];
                        let viq = v[(i, q)];
                        v[(i, p)] = vip * g_pp + viq * g_qp;
                        v[(i, q)] = vip * g_pq + viq * g_qq;
                    }
                }
            }
        }
    }
    let evals = (0..n).map(|i| a[(i, i)].re).collect();
    Ok((evals, v))
}

/// Full eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// `tol` bounds the accepted entry-wise asymmetry `|M - M†|`; the
/// Hermitian part of `m` is what gets diagonalized.
pub fn hermitian_eig(m: &ComplexMatrix, tol: f64) -> Result<EigenDecomposition> {
    check_hermitian(m, tol)?;
    let (evals, vecs) = jacobi(m.hermitian_part(), true)?;
    let vecs = vecs.expect("vectors requested");
    let n = evals.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| evals[i].total_cmp(&evals[j]));
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            eigenvectors[(i, dst)] = vecs[(i, src)];
        }
    }
    Ok(EigenDecomposition {
        eigenvalues: order.iter().map(|&i| evals[i]).collect(),
        eigenvectors,
    })
}

/// Eigenvalues only, ascending. Cheaper than [`hermitian_eig`].
pub fn hermitian_eigenvalues(m: &ComplexMatrix, tol: f64) -> Result<Vec<f64>> {
    check_hermitian(m, tol)?;
    let (mut evals, _) = jacobi(m.hermitian_part(), false)?;
    evals.sort_by(f64::total_cmp);
    Ok(evals)
}

/// Principal square root of a Hermitian positive semidefinite matrix.
///
/// Eigenvalues in `[-tol, 0)` are clipped to zero; anything more negative is
/// rejected with [`Error::NotPsd`].
pub fn matrix_sqrt_psd(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m, tol)?;
    if let Some(&min) = eig.eigenvalues.first() {
        if min < -tol {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
    }
    Ok(eig.map(|l| l.max(0.0).sqrt()))
}
