//! Entanglement quantifiers for two-qubit and maximally correlated states.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigenvalues, partial_trace, relative_entropy, sqrt_state, von_neumann_entropy,
    ComplexMatrix, SPECTRAL_FLOOR,
};
use crate::simplex::{max_fidelity_on_support, OptimizerOptions, SimplexPoint};
use crate::states::{BipartiteState, DensityMatrix, Subsystem};

/// Largest allowed difference between the two sides of the relative-entropy
/// sandwich for maximally correlated states.
pub const SANDWICH_TOL: f64 = 1e-9;

/// Partial-transpose eigenvalues at or above `-PPT_TOL` count as nonnegative.
pub const PPT_TOL: f64 = 1e-10;

/// `Σ ρ_ij |ii><jj|` for a single-system state `ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximallyCorrelatedState {
    d: usize,
    coefficients: DensityMatrix,
}

impl MaximallyCorrelatedState {
    pub fn new(coefficients: DensityMatrix) -> Self {
        Self {
            d: coefficients.dim(),
            coefficients,
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn coefficients(&self) -> &DensityMatrix {
        &self.coefficients
    }

    /// Indices `i·d + i` of the correlated product basis vectors `|ii>`.
    pub fn support(&self) -> Vec<usize> {
        (0..self.d).map(|i| i * self.d + i).collect()
    }

    pub fn to_bipartite(&self) -> BipartiteState {
        let d = self.d;
        let mut m = ComplexMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                m[(i * d + i, j * d + j)] = self.coefficients.get(i, j);
            }
        }
        let state = DensityMatrix::new(m).expect("unitary image of a state");
        BipartiteState::new(d, d, state).expect("d² = d·d")
    }

    /// The separable state `Σ q_i |ii><ii|`.
    pub fn classical(&self, q: &SimplexPoint) -> Result<BipartiteState> {
        if q.dim() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "weights of length {} for d = {}",
                q.dim(),
                self.d
            )));
        }
        let mut diag = vec![0.0; self.d * self.d];
        for (k, &w) in self.support().iter().zip(q.weights()) {
            diag[*k] = w;
        }
        BipartiteState::new(self.d, self.d, DensityMatrix::diagonal(&diag)?)
    }
}

/// Maximally correlated state produced from `rho ⊗ |0><0|` by the generalized CNOT.
pub fn mc_embed(rho: &DensityMatrix) -> MaximallyCorrelatedState {
    MaximallyCorrelatedState::new(rho.clone())
}

fn require_two_qubits(rho: &BipartiteState) -> Result<()> {
    if rho.d_s() != 2 || rho.d_a() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "two-qubit state required, got {}x{}",
            rho.d_s(),
            rho.d_a()
        )));
    }
    Ok(())
}

/// Wootters concurrence of a two-qubit state.
///
/// The spin flip is `(Y⊗Y) ρ* (Y⊗Y)` with entry-wise conjugation in the
/// product basis; the `λ_i` are square roots of the eigenvalues of
/// `√ρ ρ̃ √ρ`, which share the spectrum of `ρ ρ̃`.
pub fn concurrence_two_qubit(rho: &BipartiteState) -> Result<f64> {
    require_two_qubits(rho)?;
    let i = Complex64::new(0.0, 1.0);
    let y = ComplexMatrix::from_rows(&[
        vec![Complex64::new(0.0, 0.0), -i],
        vec![i, Complex64::new(0.0, 0.0)],
    ])?;
    let yy = y.kron(&y);
    let flipped = yy.conjugate(&rho.state().matrix().conj());
    let s = sqrt_state(rho.state())?;
    let r = s.matmul(&flipped).matmul(&s).hermitian_part();
    let mut lambdas: Vec<f64> = hermitian_eigenvalues(&r, 1e-9)?
        .into_iter()
        .map(|l| if l <= SPECTRAL_FLOOR { 0.0 } else { l.sqrt() })
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    let c = lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3];
    Ok(c.clamp(0.0, 1.0))
}

/// Geometric entanglement `½(1 − √(1 − C²))` of a two-qubit state.
///
/// The square root amplifies rounding in `C` without bound as `C → 1`, so
/// pure states use `1 − C² = 1 − 4 det ρ_S` from the reduced state instead.
pub fn e_geometric_two_qubit(rho: &BipartiteState) -> Result<f64> {
    let one_minus_c2 = if rho.state().is_pure(SPECTRAL_FLOOR) {
        require_two_qubits(rho)?;
        let s = partial_trace(rho, Subsystem::System);
        let det = s.get(0, 0).re * s.get(1, 1).re - s.get(0, 1).norm_sqr();
        1.0 - 4.0 * det
    } else {
        let c = concurrence_two_qubit(rho)?;
        1.0 - c * c
    };
    Ok(0.5 * (1.0 - one_minus_c2.clamp(0.0, 1.0).sqrt()))
}

/// `H(ρ^K) − H(ρ)` for the kept side `K`.
pub fn coherent_information(rho: &BipartiteState, keep: Subsystem) -> f64 {
    von_neumann_entropy(&partial_trace(rho, keep)) - von_neumann_entropy(rho.state())
}

/// Hashing bound `H(ρ^S) − H(ρ^{SA})`; negative values carry no information.
pub fn hashing_lower_bound(rho: &BipartiteState) -> f64 {
    coherent_information(rho, Subsystem::System)
}

/// Both sides of the relative-entropy bound for a maximally correlated state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelEntropySandwich {
    /// Hashing bound.
    pub lower: f64,
    /// Relative entropy to `Σ ρ_ii |ii><ii|`.
    pub upper: f64,
}

impl RelEntropySandwich {
    pub fn gap(&self) -> f64 {
        (self.upper - self.lower).abs()
    }
}

pub fn rel_entropy_sandwich(mc: &MaximallyCorrelatedState) -> Result<RelEntropySandwich> {
    let rho = mc.to_bipartite();
    let pops = mc.coefficients().populations();
    let chi = mc.classical(&SimplexPoint::new(
        pops.iter().map(|p| p.max(0.0)).collect(),
    )?)?;
    Ok(RelEntropySandwich {
        lower: hashing_lower_bound(&rho),
        upper: relative_entropy(rho.state(), chi.state())?,
    })
}

/// Relative entropy of entanglement of a maximally correlated state, certified
/// by the agreement of its hashing lower bound and a separable upper bound.
pub fn e_rel_entropy_mc(mc: &MaximallyCorrelatedState) -> Result<f64> {
    let s = rel_entropy_sandwich(mc)?;
    if !(s.gap() <= SANDWICH_TOL) {
        return Err(Error::CertificationFailed { gap: s.gap() });
    }
    Ok(s.lower.max(0.0))
}

/// `1 − max_q F(ρ_mc, Σ q_i |ii><ii|)`.
pub fn e_geometric_mc(mc: &MaximallyCorrelatedState, opts: &OptimizerOptions) -> Result<f64> {
    let rho = mc.to_bipartite();
    let best = max_fidelity_on_support(rho.state(), &mc.support(), opts)?;
    Ok((1.0 - best.value).max(0.0))
}

/// Partial transpose on the ancilla: `(ρ^{T_A})_{(i,j),(k,l)} = ρ_{(i,l),(k,j)}`.
pub fn partial_transpose(rho: &BipartiteState) -> ComplexMatrix {
    let (ds, da) = (rho.d_s(), rho.d_a());
    let m = rho.state().matrix();
    let mut out = ComplexMatrix::zeros(ds * da, ds * da);
    for i in 0..ds {
        for j in 0..da {
            for k in 0..ds {
                for l in 0..da {
                    out[(i * da + j, k * da + l)] = m[(i * da + l, k * da + j)];
                }
            }
        }
    }
    out
}

/// Smallest eigenvalue of the partial transpose and whether it clears `-PPT_TOL`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PptWitness {
    pub min_eigenvalue: f64,
    pub is_ppt: bool,
}

/// PPT test in any dimensions. Failing it proves entanglement; passing it
/// proves separability only for `2×2`, `2×3` and `3×2`.
pub fn ppt_check(rho: &BipartiteState) -> Result<PptWitness> {
    let eig = hermitian_eigenvalues(&partial_transpose(rho), 1e-9)?;
    let min_eigenvalue = eig[0];
    Ok(PptWitness {
        min_eigenvalue,
        is_ppt: min_eigenvalue >= -PPT_TOL,
    })
}

/// Separability decided by PPT where it is exact.
pub fn ppt_is_separable_small(rho: &BipartiteState) -> Result<bool> {
    match (rho.d_s(), rho.d_a()) {
        (2, 2) | (2, 3) | (3, 2) => Ok(ppt_check(rho)?.is_ppt),
        (d_s, d_a) => Err(Error::UnsupportedDims { d_s, d_a }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherence::{c_geometric, c_geometric_qubit, c_rel_entropy};
    use crate::states::{dephase, maximally_coherent, random_mixed, PureState};

    fn plus() -> DensityMatrix {
        DensityMatrix::qubit(0.5, Complex64::new(0.5, 0.0)).unwrap()
    }

    fn plus_product() -> BipartiteState {
        BipartiteState::product(&DensityMatrix::basis(2, 0).unwrap(), &plus()).unwrap()
    }

    #[test]
    fn concurrence_examples() {
        assert!((concurrence_two_qubit(&BipartiteState::bell()).unwrap() - 1.0).abs() < 1e-12);
        assert!(concurrence_two_qubit(&plus_product()).unwrap() < 1e-12);
        let rho = DensityMatrix::qubit(0.7, Complex64::new(0.2, -0.3)).unwrap();
        let c = concurrence_two_qubit(&mc_embed(&rho).to_bipartite()).unwrap();
        assert!((c - 2.0 * rho.get(0, 1).norm()).abs() < 1e-12);
        let wrong =
            BipartiteState::product(&plus(), &DensityMatrix::maximally_mixed(3).unwrap()).unwrap();
        assert!(concurrence_two_qubit(&wrong).is_err());
    }

    #[test]
    fn concurrence_of_werner_states() {
        // p|Φ+><Φ+| + (1-p) I/4 has C = max(0, (3p-1)/2)
        for &p in &[0.1, 1.0 / 3.0, 0.5, 0.8] {
            let bell = BipartiteState::bell().into_state();
            let mixed = DensityMatrix::maximally_mixed(4).unwrap();
            let w = DensityMatrix::mixture(&[p, 1.0 - p], &[bell, mixed]).unwrap();
            let c = concurrence_two_qubit(&BipartiteState::new(2, 2, w).unwrap()).unwrap();
            assert!(
                (c - ((3.0 * p - 1.0) / 2.0).max(0.0)).abs() < 1e-10,
                "p = {p}"
            );
        }
    }

    #[test]
    fn geometric_two_qubit_examples() {
        assert!((e_geometric_two_qubit(&BipartiteState::bell()).unwrap() - 0.5).abs() < 1e-15);
        assert!(e_geometric_two_qubit(&plus_product()).unwrap() < 1e-12);
        let rho = DensityMatrix::qubit(0.5, Complex64::new(0.3, 0.0)).unwrap();
        let e = e_geometric_two_qubit(&mc_embed(&rho).to_bipartite()).unwrap();
        assert!((e - 0.1).abs() < 1e-12);
    }

    #[test]
    fn geometric_pure_path_agrees_with_concurrence() {
        for seed in 0..50 {
            let psi = crate::states::random_pure(4, seed).unwrap();
            let sa = BipartiteState::new(2, 2, psi.to_density()).unwrap();
            let c = concurrence_two_qubit(&sa).unwrap();
            let via_c = 0.5 * (1.0 - (1.0 - c * c).max(0.0).sqrt());
            assert!(
                (e_geometric_two_qubit(&sa).unwrap() - via_c).abs() < 1e-7,
                "seed {seed}"
            );
        }
        let wrong = BipartiteState::product(
            &DensityMatrix::basis(2, 0).unwrap(),
            &DensityMatrix::basis(3, 0).unwrap(),
        )
        .unwrap();
        assert!(e_geometric_two_qubit(&wrong).is_err());
    }

    #[test]
    fn hashing_examples() {
        assert!((hashing_lower_bound(&BipartiteState::bell()) - 1.0).abs() < 1e-12);
        let mixed = BipartiteState::new(2, 2, DensityMatrix::maximally_mixed(4).unwrap()).unwrap();
        assert!((hashing_lower_bound(&mixed) + 1.0).abs() < 1e-12);
        let sigma = DensityMatrix::diagonal(&[0.2, 0.3, 0.5]).unwrap();
        let prod = BipartiteState::product(&plus(), &sigma).unwrap();
        assert!((hashing_lower_bound(&prod) + von_neumann_entropy(&sigma)).abs() < 1e-12);
    }

    #[test]
    fn embed_examples() {
        let bell = mc_embed(&plus()).to_bipartite();
        assert!(
            bell.state()
                .matrix()
                .max_abs_diff(BipartiteState::bell().state().matrix())
                < 1e-15
        );

        let diag = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let classical = mc_embed(&diag).to_bipartite();
        assert!(ppt_is_separable_small(&classical).unwrap());

        let rho = random_mixed(3, 3, 11).unwrap();
        let mc = mc_embed(&rho).to_bipartite();
        assert!((von_neumann_entropy(mc.state()) - von_neumann_entropy(&rho)).abs() < 1e-10);
        let marginal = partial_trace(&mc, Subsystem::System);
        assert!(marginal.matrix().max_abs_diff(dephase(&rho).matrix()) < 1e-15);
    }

    #[test]
    fn rel_entropy_mc_examples() {
        assert!((e_rel_entropy_mc(&mc_embed(&plus())).unwrap() - 1.0).abs() < 1e-10);
        let diag = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        assert!(e_rel_entropy_mc(&mc_embed(&diag)).unwrap() < 1e-12);

        // eigenvalues (0.9, 0.1) with |ρ01| = 0.25: p(1-p) = 0.09 + 0.0625
        let p = 0.5 + (0.25f64 - 0.1525).sqrt();
        let rho = DensityMatrix::qubit(p, Complex64::new(0.25, 0.0)).unwrap();
        let spec = rho.spectrum();
        assert!((spec[1] - 0.9).abs() < 1e-12);
        let h = |x: &[f64]| -x.iter().map(|v| v * v.log2()).sum::<f64>();
        let expected = h(&[p, 1.0 - p]) - h(&[0.9, 0.1]);
        let s = rel_entropy_sandwich(&mc_embed(&rho)).unwrap();
        assert!((s.lower - expected).abs() < 1e-10);
        assert!((s.upper - expected).abs() < 1e-10);
        assert!((e_rel_entropy_mc(&mc_embed(&rho)).unwrap() - c_rel_entropy(&rho)).abs() < 1e-10);
    }

    #[test]
    fn geometric_mc_examples() {
        let opts = OptimizerOptions::default();
        assert!((e_geometric_mc(&mc_embed(&plus()), &opts).unwrap() - 0.5).abs() < 1e-12);
        let diag = DensityMatrix::diagonal(&[0.2, 0.3, 0.5]).unwrap();
        assert!(e_geometric_mc(&mc_embed(&diag), &opts).unwrap() < 1e-9);
        let mc3 = maximally_coherent(3).unwrap().to_density();
        assert!((e_geometric_mc(&mc_embed(&mc3), &opts).unwrap() - 2.0 / 3.0).abs() < 1e-12);

        for seed in 0..5 {
            let rho = random_mixed(2, 2, seed).unwrap();
            let mc = mc_embed(&rho);
            let exact = c_geometric_qubit(&rho).unwrap();
            assert!((e_geometric_mc(&mc, &opts).unwrap() - exact).abs() < 1e-6);
            assert!((e_geometric_two_qubit(&mc.to_bipartite()).unwrap() - exact).abs() < 1e-9);
            let rho3 = random_mixed(3, 3, seed).unwrap();
            let a = e_geometric_mc(&mc_embed(&rho3), &opts).unwrap();
            let b = c_geometric(&rho3, &opts).unwrap();
            assert!((a - b).abs() < 1e-6, "seed {seed}: {a} vs {b}");
        }
    }

    #[test]
    fn ppt_examples() {
        assert!(!ppt_is_separable_small(&BipartiteState::bell()).unwrap());
        assert!(ppt_check(&BipartiteState::bell()).unwrap().min_eigenvalue < -0.49);
        assert!(ppt_is_separable_small(&plus_product()).unwrap());
        let q = DensityMatrix::maximally_mixed(3).unwrap();
        let p23 = BipartiteState::product(&plus(), &q).unwrap();
        assert!(ppt_is_separable_small(&p23).unwrap());
        let big = mc_embed(&maximally_coherent(3).unwrap().to_density()).to_bipartite();
        assert!(matches!(
            ppt_is_separable_small(&big),
            Err(Error::UnsupportedDims { d_s: 3, d_a: 3 })
        ));
        assert!(!ppt_check(&big).unwrap().is_ppt);
    }

    #[test]
    fn partial_transpose_of_product_transposes_ancilla() {
        let a = PureState::normalized(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)])
            .unwrap()
            .to_density();
        let b = DensityMatrix::qubit(0.4, Complex64::new(0.1, 0.3)).unwrap();
        let pt = partial_transpose(&BipartiteState::product(&a, &b).unwrap());
        let expected = a.matrix().kron(&b.matrix().transpose());
        assert!(pt.max_abs_diff(&expected) < 1e-15);
    }
}
