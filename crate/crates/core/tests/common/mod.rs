//! Test-side oracles that avoid the library's eigensolver.
#![allow(dead_code)]

use coherence_forge::linalg::ComplexMatrix;
use coherence_forge::Complex64;

/// Eigenvalues of a 2×2 Hermitian matrix, ascending, from the quadratic formula.
pub fn hermitian2_eigenvalues(m: &ComplexMatrix) -> [f64; 2] {
    let (a, d) = (m[(0, 0)].re, m[(1, 1)].re);
    let b = m[(0, 1)].norm();
    let mid = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    [mid - r, mid + r]
}

fn det3(m: &[[Complex64; 3]; 3]) -> Complex64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Eigenvalues of a 3×3 Hermitian matrix, ascending, by the trigonometric
/// solution of the characteristic cubic.
pub fn hermitian3_eigenvalues(m: &ComplexMatrix) -> [f64; 3] {
    let a = |i: usize, j: usize| m[(i, j)];
    let p1 = a(0, 1).norm_sqr() + a(0, 2).norm_sqr() + a(1, 2).norm_sqr();
    let q = (a(0, 0).re + a(1, 1).re + a(2, 2).re) / 3.0;
    let p2 = (0..3).map(|i| (a(i, i).re - q).powi(2)).sum::<f64>() + 2.0 * p1;
    if p2 <= 1e-300 {
        return [q; 3];
    }
    let p = (p2 / 6.0).sqrt();
    let mut b = [[Complex64::new(0.0, 0.0); 3]; 3];
    for (i, row) in b.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            let shift = if i == j { q } else { 0.0 };
            *x = (a(i, j) - shift) / p;
        }
    }
    let r = (det3(&b).re / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let hi = q + 2.0 * p * phi.cos();
    let lo = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let mid = 3.0 * q - hi - lo;
    let mut e = [lo, mid, hi];
    e.sort_by(|x, y| x.total_cmp(y));
    e
}

/// `F(ρ, diag(w))` for a qutrit as `(Tr √(√W ρ √W))²`, with the spectrum of
/// the 3×3 middle factor taken from the closed-form cubic.
pub fn fidelity_to_diagonal3(rho: &ComplexMatrix, w: &[f64; 3]) -> f64 {
    let mut m = ComplexMatrix::zeros(3, 3);
    for i in 0..3 {
        for j in 0..3 {
            m[(i, j)] = rho[(i, j)] * (w[i] * w[j]).sqrt();
        }
    }
    let s: f64 = hermitian3_eigenvalues(&m)
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .sum();
    s * s
}

/// `1 − max F(ρ, diag(w))` over the simplex grid with spacing `1/n`.
pub fn grid_geometric_coherence3(rho: &ComplexMatrix, n: usize) -> f64 {
    let mut best: f64 = 0.0;
    for i in 0..=n {
        for j in 0..=(n - i) {
            let w = [
                i as f64 / n as f64,
                j as f64 / n as f64,
                (n - i - j) as f64 / n as f64,
            ];
            best = best.max(fidelity_to_diagonal3(rho, &w));
        }
    }
    1.0 - best
}

/// Shannon entropy in bits, ignoring nonpositive entries.
pub fn entropy_bits(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

/// `H(ρ||diag(q)) = −H(ρ) − Σ ρ_ii log₂ q_i` given the spectrum of `ρ`.
pub fn rel_entropy_to_diagonal(spectrum: &[f64], populations: &[f64], q: &[f64]) -> f64 {
    let cross: f64 = populations
        .iter()
        .zip(q)
        .filter(|(p, _)| **p > 0.0)
        .map(|(p, qi)| p * qi.log2())
        .sum();
    -entropy_bits(spectrum) - cross
}
