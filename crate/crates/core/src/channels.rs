//! Kraus channels, incoherent channels and instruments, and the monotonicity
//! and convexity suites for coherence measures.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::coherence::CoherenceMeasure;
use crate::entanglement::coherent_information;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ZERO};
use crate::report::VerificationRecord;
use crate::simplex::OptimizerOptions;
use crate::states::{
    complex_gaussian, derive_seed, dirichlet_weights, random_mixed, rng_from_seed, BipartiteState,
    DensityMatrix, Subsystem,
};

/// Completeness tolerance `‖Σ K†K − 1‖_max`.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// Entries with modulus at or below this count as zero in the incoherence test.
pub const INCOHERENT_TOL: f64 = 1e-12;

/// Outcomes less likely than this are dropped from selective applications.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

/// Tolerance of the monotonicity and convexity suites.
pub const SUITE_TOL: f64 = 1e-8;

/// A completely positive trace-preserving map `ρ ↦ Σ K ρ K†`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    d_in: usize,
    d_out: usize,
    kraus_ops: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(kraus_ops: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus_ops
            .first()
            .ok_or_else(|| Error::InvalidChannel("no Kraus operators".into()))?;
        let (d_out, d_in) = (first.rows(), first.cols());
        if d_in == 0 || d_out == 0 {
            return Err(Error::InvalidChannel("empty Kraus operator".into()));
        }
        let mut sum = ComplexMatrix::zeros(d_in, d_in);
        for (l, k) in kraus_ops.iter().enumerate() {
            if k.rows() != d_out || k.cols() != d_in {
                return Err(Error::InvalidChannel(format!(
                    "operator {l} is {}x{}, expected {d_out}x{d_in}",
                    k.rows(),
                    k.cols()
                )));
            }
            sum = &sum + &k.adjoint().matmul(k);
        }
        let defect = sum.max_abs_diff(&ComplexMatrix::identity(d_in));
        if !(defect <= COMPLETENESS_TOL) {
            return Err(Error::InvalidChannel(format!(
                "completeness violated by {defect:e}"
            )));
        }
        Ok(Self {
            d_in,
            d_out,
            kraus_ops,
        })
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::new(vec![ComplexMatrix::identity(d)])
    }

    /// Conjugation by a single operator of unit-norm columns.
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    /// Complete dephasing `{|i><i|}`.
    pub fn dephasing(d: usize) -> Result<Self> {
        Self::new(
            (0..d)
                .map(|k| ComplexMatrix::basis_projector(d, k))
                .collect(),
        )
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus_ops
    }

    pub fn n_kraus(&self) -> usize {
        self.kraus_ops.len()
    }

    fn check_input(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() != self.d_in {
            return Err(Error::DimensionMismatch(format!(
                "channel takes dimension {}, state has {}",
                self.d_in,
                rho.dim()
            )));
        }
        Ok(())
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.check_input(rho)?;
        let mut out = ComplexMatrix::zeros(self.d_out, self.d_out);
        for k in &self.kraus_ops {
            out = &out + &k.conjugate(rho.matrix());
        }
        DensityMatrix::new(out)
    }

    /// Branch probabilities `p_l = Tr K_l ρ K_l†` and normalized branch states.
    pub fn apply_selective(&self, rho: &DensityMatrix) -> Result<Vec<SelectiveOutcome>> {
        self.check_input(rho)?;
        let mut outcomes = Vec::new();
        for (l, k) in self.kraus_ops.iter().enumerate() {
            let branch = k.conjugate(rho.matrix());
            let p = branch.trace().re;
            if p < PROBABILITY_FLOOR {
                continue;
            }
            outcomes.push(SelectiveOutcome {
                operator: l,
                probability: p,
                state: DensityMatrix::new(branch.scale_real(1.0 / p))?,
            });
        }
        Ok(outcomes)
    }
}

/// One branch of a selective operation.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectiveOutcome {
    /// Index of the Kraus operator that produced this branch.
    pub operator: usize,
    pub probability: f64,
    pub state: DensityMatrix,
}

/// A Kraus channel whose operators each map basis states to multiples of
/// basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct IncoherentChannel {
    base: KrausChannel,
    certified: bool,
}

impl IncoherentChannel {
    pub fn base(&self) -> &KrausChannel {
        &self.base
    }

    pub fn certified(&self) -> bool {
        self.certified
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.base.apply(rho)
    }

    pub fn apply_selective(&self, rho: &DensityMatrix) -> Result<Vec<SelectiveOutcome>> {
        self.base.apply_selective(rho)
    }
}

/// Checks that every Kraus column has at most one entry above `tol`, and
/// that `K |i><i| K†` is diagonal for every basis state.
pub fn certify_incoherent(channel: KrausChannel, tol: f64) -> Result<IncoherentChannel> {
    for (l, k) in channel.kraus_ops.iter().enumerate() {
        for j in 0..k.cols() {
            let col = k.column(j);
            if col.iter().filter(|z| z.norm() > tol).count() > 1 {
                return Err(Error::NotIncoherent {
                    operator: l,
                    column: j,
                });
            }
            if ComplexMatrix::outer(&col, &col).max_off_diagonal() > tol {
                return Err(Error::NotIncoherent {
                    operator: l,
                    column: j,
                });
            }
        }
    }
    Ok(IncoherentChannel {
        base: channel,
        certified: true,
    })
}

/// Removes from `v` its components along the orthonormal `basis`.
fn project_out(v: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for u in basis {
        let overlap: Complex64 = u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
        for (vi, ui) in v.iter_mut().zip(u) {
            *vi -= overlap * ui;
        }
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

const RESAMPLE_ATTEMPTS: usize = 32;

/// Random incoherent channel on dimension `d` with `n_kraus` operators.
///
/// Operator `l` sends column `j` to row `f_l(j)` with amplitude `c_{l,j}`:
/// targets are uniform and amplitudes complex Gaussian. Columns are drawn in
/// order, and each new amplitude vector `c_{·,j'}` is projected orthogonal to
/// the earlier columns it collides with, so that `Σ K†K` stays diagonal.
/// A column whose projection nearly vanishes redraws its targets.
pub fn random_incoherent_channel(d: usize, n_kraus: usize, seed: u64) -> Result<IncoherentChannel> {
    if d == 0 || n_kraus == 0 {
        return Err(Error::InvalidArgument(
            "dimension and number of Kraus operators must be positive".into(),
        ));
    }
    let mut rng = rng_from_seed(seed);
    // targets[l][j], amps[j][l]
    let mut targets = vec![vec![0usize; d]; n_kraus];
    let mut amps: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    for jp in 0..d {
        let mut column = None;
        for attempt in 0..=RESAMPLE_ATTEMPTS {
            for (l, t) in targets.iter_mut().enumerate() {
                t[jp] = if attempt < RESAMPLE_ATTEMPTS {
                    rng.random_range(0..d)
                } else {
                    // every operator gets a row no earlier column uses
                    let used: Vec<usize> = t[..jp].to_vec();
                    let free: Vec<usize> = (0..d).filter(|r| !used.contains(r)).collect();
                    free[(l + jp) % free.len()]
                };
            }
            let mut c: Vec<Complex64> = (0..n_kraus).map(|_| complex_gaussian(&mut rng)).collect();
            let scale = norm(&c);
            let mut basis: Vec<Vec<Complex64>> = Vec::new();
            for (j, prev) in amps.iter().enumerate() {
                let mut u: Vec<Complex64> = (0..n_kraus)
                    .map(|l| {
                        if targets[l][j] == targets[l][jp] {
                            prev[l]
                        } else {
                            ZERO
                        }
                    })
                    .collect();
                project_out(&mut u, &basis);
                let n = norm(&u);
                if n > 1e-12 {
                    u.iter_mut().for_each(|z| *z /= n);
                    basis.push(u);
                }
            }
            project_out(&mut c, &basis);
            let n = norm(&c);
            if n > 1e-6 * scale {
                c.iter_mut().for_each(|z| *z /= n);
                column = Some(c);
                break;
            }
        }
        amps.push(column.expect("the last attempt has no collisions"));
    }
    let ops = (0..n_kraus)
        .map(|l| {
            let mut k = ComplexMatrix::zeros(d, d);
            for j in 0..d {
                k[(targets[l][j], j)] = amps[j][l];
            }
            k
        })
        .collect();
    certify_incoherent(KrausChannel::new(ops)?, INCOHERENT_TOL)
}

/// Shift `|j> ↦ |(i + j) mod d>`.
fn shift(d: usize, i: usize) -> ComplexMatrix {
    let mut u = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        u[((i + j) % d, j)] = Complex64::new(1.0, 0.0);
    }
    u
}

/// Incoherent channel on `S ⊗ A ⊗ B` that applies the instrument `{K_i}` on
/// `S`, runs `branches[i]` on `SA`, and records the outcome by shifting `B`.
///
/// Operators are `M_ij = L_ij (K_i ⊗ 1_A) ⊗ U_i`, with `L_ij` the Kraus
/// operators of `branches[i]` and `U_i` the shift by `i`. On a `B` register
/// prepared in `|0>` the output is `Σ_i p_i σ_i ⊗ |i><i|`.
pub fn tripartite_flag_dilation(
    instrument: &IncoherentChannel,
    branches: &[IncoherentChannel],
    d_a: usize,
    d_b: usize,
) -> Result<IncoherentChannel> {
    let ks = instrument.base().kraus_ops();
    let d_s = instrument.base().d_in();
    if instrument.base().d_out() != d_s {
        return Err(Error::InvalidChannel(
            "instrument must preserve dimension".into(),
        ));
    }
    if branches.len() != ks.len() {
        return Err(Error::InvalidChannel(format!(
            "{} branch channels for {} outcomes",
            branches.len(),
            ks.len()
        )));
    }
    if d_b < ks.len() {
        return Err(Error::InvalidArgument(format!(
            "flag register of dimension {d_b} cannot record {} outcomes",
            ks.len()
        )));
    }
    let id_a = ComplexMatrix::identity(d_a);
    let mut ops = Vec::new();
    for (i, (k, branch)) in ks.iter().zip(branches).enumerate() {
        let b = branch.base();
        if b.d_in() != d_s * d_a || b.d_out() != d_s * d_a {
            return Err(Error::DimensionMismatch(format!(
                "branch {i} acts on dimension {}, expected {}",
                b.d_in(),
                d_s * d_a
            )));
        }
        let first = k.kron(&id_a);
        let u = shift(d_b, i);
        for l in b.kraus_ops() {
            ops.push(l.matmul(&first).kron(&u));
        }
    }
    certify_incoherent(KrausChannel::new(ops)?, INCOHERENT_TOL)
}

/// Compares the `S:AB` coherent information `H(AB) − H(SAB)` of the dilated
/// output with the branch average of `H(A) − H(SA)`.
pub fn verify_flag_dilation(
    instrument: &IncoherentChannel,
    branches: &[IncoherentChannel],
    rho_sa: &BipartiteState,
    d_b: usize,
) -> Result<VerificationRecord> {
    let (d_s, d_a) = (rho_sa.d_s(), rho_sa.d_a());
    let dilated = tripartite_flag_dilation(instrument, branches, d_a, d_b)?;
    let flag0 = DensityMatrix::basis(d_b, 0)?;
    let input = rho_sa.state().tensor(&flag0)?;
    let out = BipartiteState::new(d_s, d_a * d_b, dilated.apply(&input)?)?;
    let joint = coherent_information(&out, Subsystem::Ancilla);

    let id_a = ComplexMatrix::identity(d_a);
    let mut average = 0.0;
    for (k, branch) in instrument.base().kraus_ops().iter().zip(branches) {
        let kk = k.kron(&id_a).conjugate(rho_sa.state().matrix());
        let p = kk.trace().re;
        if p < PROBABILITY_FLOOR {
            continue;
        }
        let sigma = branch.apply(&DensityMatrix::new(kk.scale_real(1.0 / p))?)?;
        average +=
            p * coherent_information(&BipartiteState::new(d_s, d_a, sigma)?, Subsystem::Ancilla);
    }
    Ok(
        VerificationRecord::inequality("flag-dilation", average, joint, SUITE_TOL)
            .with_input(&[rho_sa.state().matrix()]),
    )
}

fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<DensityMatrix> {
    let rank = rng.random_range(1..=dim);
    random_mixed(dim, rank, rng.random())
}

/// Draws a random state and random incoherent channel per trial and checks
/// `C(Λ[ρ]) ≤ C(ρ)` and `Σ p_l C(ς_l) ≤ C(ρ)`; two records per trial.
pub fn monotonicity_suite(
    measure: CoherenceMeasure,
    dim: usize,
    trials: usize,
    seed: u64,
    opts: &OptimizerOptions,
) -> Result<Vec<VerificationRecord>> {
    let per_trial: Vec<Result<[VerificationRecord; 2]>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let trial_seed = derive_seed(seed, t as u64);
            let mut rng = rng_from_seed(trial_seed);
            let rho = random_state(dim, &mut rng)?;
            let n_kraus = rng.random_range(1..=4);
            let channel = random_incoherent_channel(dim, n_kraus, rng.random())?;
            let c_in = measure.evaluate(&rho, opts)?;
            let c_out = measure.evaluate(&channel.apply(&rho)?, opts)?;
            let mut average = 0.0;
            for o in channel.apply_selective(&rho)? {
                average += o.probability * measure.evaluate(&o.state, opts)?;
            }
            let tag = |kind: &str| format!("monotonicity-{kind}:{measure}");
            Ok([
                VerificationRecord::inequality(tag("c2"), c_out, c_in, SUITE_TOL),
                VerificationRecord::inequality(tag("c3"), average, c_in, SUITE_TOL),
            ]
            .map(|r| r.with_trial(t, trial_seed).with_input(&[rho.matrix()])))
        })
        .collect();
    let mut out = Vec::with_capacity(2 * trials);
    for r in per_trial {
        out.extend(r?);
    }
    Ok(out)
}

/// Mixes 2–4 random states with Dirichlet weights per trial and checks
/// `C(Σ p_i ρ_i) ≤ Σ p_i C(ρ_i)`.
pub fn convexity_suite(
    measure: CoherenceMeasure,
    dim: usize,
    trials: usize,
    seed: u64,
    opts: &OptimizerOptions,
) -> Result<Vec<VerificationRecord>> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let trial_seed = derive_seed(seed, t as u64);
            let mut rng = rng_from_seed(trial_seed);
            let k = rng.random_range(2..=4);
            let states: Vec<DensityMatrix> = (0..k)
                .map(|_| random_state(dim, &mut rng))
                .collect::<Result<_>>()?;
            let weights = dirichlet_weights(k, &mut rng);
            let mix = DensityMatrix::mixture(&weights, &states)?;
            let mut average = 0.0;
            for (w, s) in weights.iter().zip(&states) {
                average += w * measure.evaluate(s, opts)?;
            }
            let lhs = measure.evaluate(&mix, opts)?;
            let inputs: Vec<&ComplexMatrix> = states.iter().map(|s| s.matrix()).collect();
            Ok(VerificationRecord::inequality(
                format!("convexity:{measure}"),
                lhs,
                average,
                SUITE_TOL,
            )
            .with_trial(t, trial_seed)
            .with_input(&inputs))
        })
        .collect()
}
