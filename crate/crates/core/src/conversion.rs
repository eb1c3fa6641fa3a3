//! Turning coherence into system–ancilla entanglement with the generalized
//! CNOT, and executable checks of the resulting bounds and equalities.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::channels::{certify_incoherent, IncoherentChannel, KrausChannel, INCOHERENT_TOL};
use crate::coherence::{c_geometric_qubit, c_rel_entropy};
use crate::entanglement::{
    concurrence_two_qubit, e_geometric_two_qubit, hashing_lower_bound, mc_embed,
    ppt_is_separable_small, rel_entropy_sandwich,
};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ZERO};
use crate::report::VerificationRecord;
use crate::states::{is_bipartite_incoherent, is_incoherent, BipartiteState, DensityMatrix};

/// Tolerance of the unitarity check `‖U†U − 1‖_max`.
pub const UNITARY_TOL: f64 = 1e-10;

/// Slack allowed in entanglement-below-coherence checks.
pub const BOUND_TOL: f64 = 1e-8;

/// Slack allowed in exact equalities.
pub const EQUALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    matrix: ComplexMatrix,
    incoherent: bool,
}

impl UnitaryMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let defect = matrix
            .adjoint()
            .matmul(&matrix)
            .max_abs_diff(&ComplexMatrix::identity(matrix.rows()));
        if !(defect <= UNITARY_TOL) {
            return Err(Error::InvalidArgument(format!(
                "not unitary: defect {defect:e}"
            )));
        }
        let incoherent = (0..matrix.cols()).all(|j| {
            let big: Vec<Complex64> = matrix
                .column(j)
                .into_iter()
                .filter(|z| z.norm() > INCOHERENT_TOL)
                .collect();
            big.len() == 1 && (big[0].norm() - 1.0).abs() <= UNITARY_TOL
        });
        Ok(Self { matrix, incoherent })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// True iff every column has exactly one nonzero entry, of unit modulus.
    pub fn is_incoherent(&self) -> bool {
        self.incoherent
    }

    pub fn to_channel(&self) -> Result<IncoherentChannel> {
        certify_incoherent(KrausChannel::unitary(self.matrix.clone())?, INCOHERENT_TOL)
    }
}

/// `Σ_i |i><i| ⊗ (Σ_{j<d_s} |(i+j) mod d_s><j| + Σ_{j≥d_s} |j><j|)` on `S ⊗ A`.
pub fn generalized_cnot(d_s: usize, d_a: usize) -> Result<UnitaryMatrix> {
    if d_s == 0 || d_a < d_s {
        return Err(Error::InvalidArgument(format!(
            "ancilla dimension {d_a} must be at least the system dimension {d_s}"
        )));
    }
    let n = d_s * d_a;
    let mut u = ComplexMatrix::zeros(n, n);
    let one = Complex64::new(1.0, 0.0);
    for i in 0..d_s {
        for j in 0..d_a {
            let target = if j < d_s { (i + j) % d_s } else { j };
            u[(i * d_a + target, i * d_a + j)] = one;
        }
    }
    UnitaryMatrix::new(u)
}

/// `ρ ⊗ |0><0|` on `S ⊗ A`.
pub fn attach_ancilla(rho: &DensityMatrix, d_a: usize) -> Result<BipartiteState> {
    BipartiteState::product(rho, &DensityMatrix::basis(d_a, 0)?)
}

/// `U (ρ ⊗ |0><0|) U†` for the generalized CNOT `U`.
pub fn convert(rho: &DensityMatrix, d_a: usize) -> Result<BipartiteState> {
    let u = generalized_cnot(rho.dim(), d_a)?;
    let attached = attach_ancilla(rho, d_a)?;
    let out = DensityMatrix::new(u.matrix().conjugate(attached.state().matrix()))?;
    BipartiteState::new(rho.dim(), d_a, out)
}

/// Paired coherence and entanglement quantities compared by the bound checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurePair {
    /// `C_g` (qubit closed form) against `E_g` (two-qubit closed form).
    Geometric,
    /// `C_r` against the hashing lower bound on `E_r`.
    RelEntropyMcFamily,
}

impl MeasurePair {
    pub fn name(self) -> &'static str {
        match self {
            Self::Geometric => "geometric",
            Self::RelEntropyMcFamily => "rel_entropy",
        }
    }

    pub fn coherence(self, rho: &DensityMatrix) -> Result<f64> {
        match self {
            Self::Geometric => c_geometric_qubit(rho),
            Self::RelEntropyMcFamily => Ok(c_rel_entropy(rho)),
        }
    }

    pub fn entanglement(self, sa: &BipartiteState) -> Result<f64> {
        match self {
            Self::Geometric => {
                if sa.d_s() != 2 || sa.d_a() != 2 {
                    return Err(Error::UnsupportedDims {
                        d_s: sa.d_s(),
                        d_a: sa.d_a(),
                    });
                }
                e_geometric_two_qubit(sa)
            }
            Self::RelEntropyMcFamily => Ok(hashing_lower_bound(sa)),
        }
    }
}

impl fmt::Display for MeasurePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasurePair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "geometric" | "cg" => Ok(Self::Geometric),
            "rel_entropy" | "rel-entropy" | "cr" => Ok(Self::RelEntropyMcFamily),
            other => Err(Error::InvalidArgument(format!(
                "unknown measure pair `{other}`"
            ))),
        }
    }
}

fn output_of(
    rho: &DensityMatrix,
    channel: &IncoherentChannel,
    d_a: usize,
) -> Result<BipartiteState> {
    let input = attach_ancilla(rho, d_a)?;
    BipartiteState::new(rho.dim(), d_a, channel.apply(input.state())?)
}

/// Checks `E(Λ[ρ ⊗ |0><0|]) ≤ C(ρ)` for an incoherent channel `Λ` on `S ⊗ A`.
pub fn verify_theorem1(
    rho: &DensityMatrix,
    channel: &IncoherentChannel,
    d_a: usize,
    pair: MeasurePair,
) -> Result<VerificationRecord> {
    if pair == MeasurePair::Geometric && (rho.dim() != 2 || d_a != 2) {
        return Err(Error::UnsupportedDims {
            d_s: rho.dim(),
            d_a,
        });
    }
    let out = output_of(rho, channel, d_a)?;
    let e = pair.entanglement(&out)?;
    let c = pair.coherence(rho)?;
    Ok(
        VerificationRecord::inequality(format!("theorem1:{pair}"), e, c, BOUND_TOL)
            .with_input(&[rho.matrix()]),
    )
}

/// Checks that the relative entropy of entanglement of the converted state,
/// certified by its bound sandwich, equals `C_r(ρ)`.
pub fn verify_equality_cr(rho: &DensityMatrix) -> Result<VerificationRecord> {
    let s = rel_entropy_sandwich(&mc_embed(rho))?;
    let c = c_rel_entropy(rho);
    let gap = VerificationRecord::equality("cr-sandwich", s.lower, s.upper, EQUALITY_TOL);
    let eq = VerificationRecord::equality("cr-equality", s.lower.max(0.0), c, EQUALITY_TOL);
    Ok(eq.and(gap).with_input(&[rho.matrix()]))
}

/// Incoherent inputs must convert to separable states and coherent inputs to
/// entangled ones.
///
/// Separability is decided by PPT for qubits and by diagonality in the
/// product basis otherwise. Entanglement is witnessed by a positive
/// concurrence for qubits and a positive hashing bound otherwise.
pub fn verify_theorem2(rho: &DensityMatrix, tol: f64) -> Result<VerificationRecord> {
    let d = rho.dim();
    let out = convert(rho, d)?;
    let off = rho.matrix().max_off_diagonal();
    let r = if is_incoherent(rho, tol) {
        if d == 2 {
            let sep = ppt_is_separable_small(&out)?;
            VerificationRecord::predicate("theorem2-separable", sep, off, tol)
        } else {
            let sep = is_bipartite_incoherent(&out, tol);
            VerificationRecord::predicate("theorem2-separable", sep, off, tol)
        }
    } else if d == 2 {
        let c = concurrence_two_qubit(&out)?;
        VerificationRecord::predicate("theorem2-entangled", c > 0.0, 0.0, c)
    } else {
        let h = hashing_lower_bound(&out);
        VerificationRecord::predicate("theorem2-entangled", h > 0.0, 0.0, h)
    };
    Ok(r.with_input(&[rho.matrix()]))
}

/// Largest entanglement reached from `ρ ⊗ |0><0|` over the given channels.
///
/// Only a lower bound on the supremum over all incoherent operations.
pub fn c_e_lower_bound(
    rho: &DensityMatrix,
    channels: &[IncoherentChannel],
    d_a: usize,
    pair: MeasurePair,
) -> Result<f64> {
    if channels.is_empty() {
        return Err(Error::InvalidArgument("no channels supplied".into()));
    }
    let mut best = f64::NEG_INFINITY;
    for ch in channels {
        best = best.max(pair.entanglement(&output_of(rho, ch, d_a)?)?);
    }
    Ok(best)
}

/// Product-basis index of `|i>_S ⊗ |j>_A`.
pub fn product_index(i: usize, j: usize, d_a: usize) -> usize {
    i * d_a + j
}

/// Image of each product basis state under an incoherent unitary, or `None`
/// if some column is not a single unit-modulus entry.
pub fn basis_permutation(u: &UnitaryMatrix) -> Option<Vec<usize>> {
    (0..u.dim())
        .map(|j| {
            let col = u.matrix().column(j);
            let nz: Vec<usize> = (0..col.len()).filter(|&r| col[r] != ZERO).collect();
            (nz.len() == 1 && (col[nz[0]].norm() - 1.0).abs() <= UNITARY_TOL).then(|| nz[0])
        })
        .collect()
}
