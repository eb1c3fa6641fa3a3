//! Information-theoretic functionals of density matrices: fidelity,
//! von Neumann entropy, relative entropy and the partial trace.

use num_complex::Complex64;

use super::eig::{hermitian_eig, hermitian_eigenvalues, EigenDecomposition, PSD_CLIP};
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::states::{BipartiteState, DensityMatrix, Subsystem};

/// Eigenvalues of unit-scale PSD matrices below this are rounding noise.
/// Taking square roots would otherwise amplify ~1e-16 noise to ~1e-8.
pub const SPECTRAL_FLOOR: f64 = 1e-14;

/// Support threshold for the relative entropy.
pub const SUPPORT_TOL: f64 = 1e-12;

fn floored_sqrt(l: f64) -> f64 {
    if l <= SPECTRAL_FLOOR {
        0.0
    } else {
        l.sqrt()
    }
}

fn check_same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// `√ρ` with the spectral floor applied, for repeated fidelity evaluations.
pub fn sqrt_state(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    Ok(hermitian_eig(rho.matrix(), PSD_CLIP)?.map(floored_sqrt))
}

/// `(Tr √(√ρ σ √ρ))²` given a precomputed `√ρ`.
pub fn fidelity_with_sqrt(sqrt_rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    let m = sqrt_rho.matmul(sigma).matmul(sqrt_rho);
    let root_sum: f64 = hermitian_eigenvalues(&m, 1e-9)?
        .into_iter()
        .map(floored_sqrt)
        .sum();
    Ok((root_sum * root_sum).clamp(0.0, 1.0))
}

/// Uhlmann fidelity `F(ρ, σ) = (Tr √(√ρ σ √ρ))²`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_same_dim(rho, sigma)?;
    fidelity_with_sqrt(&sqrt_state(rho)?, sigma.matrix())
}

/// Shannon entropy (bits) of a probability vector; `0 log 0 = 0`,
/// negative rounding noise is ignored.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    let h: f64 = p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum();
    h.max(0.0)
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    shannon_entropy(rho.spectrum())
}

/// Quantum relative entropy `H(ρ||σ) = Tr ρ log₂ρ − Tr ρ log₂σ` in bits.
///
/// Returns `+∞` when some eigenvector of `σ` with eigenvalue below
/// [`SUPPORT_TOL`] carries more than [`SUPPORT_TOL`] weight of `ρ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_same_dim(rho, sigma)?;
    let eig: EigenDecomposition = hermitian_eig(sigma.matrix(), PSD_CLIP)?;
    let mut cross = 0.0;
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvector(k);
        let weight = expectation(rho.matrix(), &v);
        if lambda < SUPPORT_TOL {
            if weight > SUPPORT_TOL {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        cross += weight * lambda.log2();
    }
    let value = -von_neumann_entropy(rho) - cross;
    Ok(value.max(0.0))
}

/// `<v|M|v>` (real part).
pub fn expectation(m: &ComplexMatrix, v: &[Complex64]) -> f64 {
    m.apply(v)
        .iter()
        .zip(v)
        .map(|(mv, vi)| (vi.conj() * mv).re)
        .sum()
}

/// Traces out the subsystem not named by `keep`.
pub fn partial_trace(rho: &BipartiteState, keep: Subsystem) -> DensityMatrix {
    let (ds, da) = (rho.d_s(), rho.d_a());
    let m = rho.state().matrix();
    let out = match keep {
        Subsystem::System => {
            let mut r = ComplexMatrix::zeros(ds, ds);
            for i in 0..ds {
                for j in 0..ds {
                    r[(i, j)] = (0..da).map(|a| m[(i * da + a, j * da + a)]).sum();
                }
            }
            r
        }
        Subsystem::Ancilla => {
            let mut r = ComplexMatrix::zeros(da, da);
            for a in 0..da {
                for b in 0..da {
                    r[(a, b)] = (0..ds).map(|i| m[(i * da + a, i * da + b)]).sum();
                }
            }
            r
        }
    };
    DensityMatrix::new(out).expect("partial trace of a state is a state")
}
