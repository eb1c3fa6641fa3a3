//! Quantum states in the computational (reference) basis, incoherence
//! predicates, dephasing, and seeded random state generation.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix, ZERO};

/// Tolerance used when validating state invariants at construction.
pub const VALIDATION_TOL: f64 = 1e-10;

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    spectrum: Vec<f64>,
}

impl DensityMatrix {
    /// Validates and wraps `matrix`. The stored matrix is its Hermitian part.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(Error::InvalidState(format!(
                "matrix must be square and nonempty, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let asym = matrix.hermitian_asymmetry();
        if asym > VALIDATION_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian: asymmetry {asym:e}"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > VALIDATION_TOL || tr.im.abs() > VALIDATION_TOL {
            return Err(Error::InvalidState(format!(
                "trace is {}{:+}i, expected 1",
                tr.re, tr.im
            )));
        }
        let matrix = matrix.hermitian_part();
        let spectrum = hermitian_eigenvalues(&matrix, VALIDATION_TOL)?;
        if spectrum[0] < -VALIDATION_TOL {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite: eigenvalue {:e}",
                spectrum[0]
            )));
        }
        Ok(Self { matrix, spectrum })
    }

    /// Diagonal state `diag(p)`; `p` must be a probability vector.
    pub fn diagonal(p: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diag(p))
    }

    pub fn maximally_mixed(d: usize) -> Result<Self> {
        check_dim(d)?;
        Self::diagonal(&vec![1.0 / d as f64; d])
    }

    /// Projector onto computational basis state `|k>`.
    pub fn basis(d: usize, k: usize) -> Result<Self> {
        if k >= d {
            return Err(Error::InvalidArgument(format!("basis index {k} >= {d}")));
        }
        Self::new(ComplexMatrix::basis_projector(d, k))
    }

    /// Qubit state with diagonal `(p, 1 - p)` and off-diagonal element `rho01`.
    pub fn qubit(p: f64, rho01: Complex64) -> Result<Self> {
        Self::new(ComplexMatrix::from_rows(&[
            vec![Complex64::new(p, 0.0), rho01],
            vec![rho01.conj(), Complex64::new(1.0 - p, 0.0)],
        ])?)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Ascending eigenvalues computed at construction.
    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    /// Real diagonal (the populations).
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    /// Purity-based rank-1 test: the largest eigenvalue is 1 within `tol`.
    pub fn is_pure(&self, tol: f64) -> bool {
        self.spectrum
            .last()
            .is_some_and(|&l| (1.0 - l).abs() <= tol)
    }

    /// `rho ⊗ other`.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(self.matrix.kron(&other.matrix))
    }

    /// Convex combination `Σ w_i rho_i`.
    pub fn mixture(weights: &[f64], states: &[DensityMatrix]) -> Result<DensityMatrix> {
        let first = states
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        if weights.len() != states.len() {
            return Err(Error::InvalidArgument(
                "weights and states differ in length".into(),
            ));
        }
        let d = first.dim();
        let mut acc = ComplexMatrix::zeros(d, d);
        for (w, s) in weights.iter().zip(states) {
            if s.dim() != d {
                return Err(Error::DimensionMismatch(format!("{} vs {d}", s.dim())));
            }
            acc = &acc + &s.matrix.scale_real(*w);
        }
        DensityMatrix::new(acc)
    }
}

/// Unit-norm state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("empty amplitude vector".into()));
        }
        let norm: f64 = amplitudes.iter().map(Complex64::norm_sqr).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!(
                "norm squared is {norm}, expected 1"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes
            .iter()
            .map(Complex64::norm_sqr)
            .sum::<f64>()
            .sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Self::new(amplitudes)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::outer(&self.amplitudes, &self.amplitudes))
            .expect("projector onto a unit vector is a valid state")
    }
}

/// Which factor of a bipartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    System,
    Ancilla,
}

/// A density matrix on `C^{d_s} ⊗ C^{d_a}` (system first).
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    d_s: usize,
    d_a: usize,
    state: DensityMatrix,
}

impl BipartiteState {
    pub fn new(d_s: usize, d_a: usize, state: DensityMatrix) -> Result<Self> {
        if d_s == 0 || d_a == 0 || d_s * d_a != state.dim() {
            return Err(Error::DimensionMismatch(format!(
                "subsystems {d_s}x{d_a} do not match state dimension {}",
                state.dim()
            )));
        }
        Ok(Self { d_s, d_a, state })
    }

    pub fn product(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<Self> {
        Self::new(rho.dim(), sigma.dim(), rho.tensor(sigma)?)
    }

    /// Bell state `(|00> + |11>)/√2`.
    pub fn bell() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let c = Complex64::new(s, 0.0);
        let psi = PureState::new(vec![c, ZERO, ZERO, c]).expect("unit norm");
        Self::new(2, 2, psi.to_density()).expect("4 = 2 * 2")
    }

    pub fn d_s(&self) -> usize {
        self.d_s
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn into_state(self) -> DensityMatrix {
        self.state
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        Err(Error::InvalidArgument("dimension must be positive".into()))
    } else {
        Ok(())
    }
}

/// Keeps only the diagonal of `rho` in the reference basis.
pub fn dephase(rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::diagonal(&rho.populations()).expect("diagonal of a state is a state")
}

/// True iff every off-diagonal entry has modulus at most `tol`.
pub fn is_incoherent(rho: &DensityMatrix, tol: f64) -> bool {
    rho.matrix().max_off_diagonal() <= tol
}

/// True iff the state is diagonal in the product reference basis.
///
/// Diagonal product-basis states are exactly the mixtures of products of
/// incoherent states, so no decomposition search is needed.
pub fn is_bipartite_incoherent(rho: &BipartiteState, tol: f64) -> bool {
    is_incoherent(rho.state(), tol)
}

/// Uniform superposition `(1/√d) Σ |i>`.
pub fn maximally_coherent(d: usize) -> Result<PureState> {
    check_dim(d)?;
    let a = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    PureState::normalized(vec![a; d])
}

/// Deterministic generator for a seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes `seed` and `stream` into an independent child seed (splitmix64).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Flat Dirichlet sample (uniform on the probability simplex).
pub fn dirichlet_weights<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let mut w: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = w.iter().sum();
        if total > 0.0 {
            w.iter_mut().for_each(|x| *x /= total);
            return w;
        }
    }
}

/// Haar-random pure state: a normalized vector of i.i.d. complex Gaussians.
pub fn random_pure(d: usize, seed: u64) -> Result<PureState> {
    check_dim(d)?;
    let mut rng = rng_from_seed(seed);
    loop {
        let v: Vec<Complex64> = (0..d).map(|_| complex_gaussian(&mut rng)).collect();
        if let Ok(psi) = PureState::normalized(v) {
            return Ok(psi);
        }
    }
}

/// Random mixed state `G G† / Tr(G G†)` for a `d x rank` Ginibre matrix `G`.
/// With `rank == d` this samples the Hilbert–Schmidt ensemble.
pub fn random_mixed(d: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    check_dim(d)?;
    if rank == 0 || rank > d {
        return Err(Error::InvalidArgument(format!(
            "rank must be in 1..={d}, got {rank}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let g_entries: Vec<Complex64> = (0..d * rank).map(|_| complex_gaussian(&mut rng)).collect();
    let g = ComplexMatrix::from_vec(d, rank, g_entries)?;
    let w = g.matmul(&g.adjoint());
    let tr = w.trace().re;
    DensityMatrix::new(w.scale_real(1.0 / tr))
}

/// Random diagonal state with flat-Dirichlet populations.
pub fn random_diagonal(d: usize, seed: u64) -> Result<DensityMatrix> {
    check_dim(d)?;
    let mut rng = rng_from_seed(seed);
    DensityMatrix::diagonal(&dirichlet_weights(d, &mut rng))
}
