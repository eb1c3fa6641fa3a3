//! Coherence quantifiers relative to the computational basis.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{relative_entropy, von_neumann_entropy};
use crate::report::VerificationRecord;
use crate::simplex::{max_fidelity_on_support, OptimizerOptions, SimplexPoint};
use crate::states::{dephase, rng_from_seed, DensityMatrix};

/// Values within this of zero from below are rounding noise.
pub const NEGATIVE_CLIP: f64 = 1e-9;

fn clip(x: f64) -> f64 {
    if (-NEGATIVE_CLIP..0.0).contains(&x) {
        0.0
    } else {
        x
    }
}

/// `ℓ₁`-norm of coherence: sum of off-diagonal moduli.
pub fn c_l1(rho: &DensityMatrix) -> f64 {
    let d = rho.dim();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                s += rho.get(i, j).norm();
            }
        }
    }
    s
}

/// Relative entropy of coherence `H(ρ_d) − H(ρ)`.
pub fn c_rel_entropy(rho: &DensityMatrix) -> f64 {
    clip(von_neumann_entropy(&dephase(rho)) - von_neumann_entropy(rho)).max(0.0)
}

/// Checks that no sampled diagonal `σ` beats the dephased state in `H(ρ||σ)`.
///
/// `lhs` is `H(ρ||ρ_d)`, `rhs` the smallest sampled `H(ρ||σ)`.
pub fn c_rel_entropy_is_minimum(
    rho: &DensityMatrix,
    n_samples: usize,
    seed: u64,
) -> Result<VerificationRecord> {
    let at_dephased = relative_entropy(rho, &dephase(rho))?;
    let mut rng = rng_from_seed(seed);
    let mut best = f64::INFINITY;
    for _ in 0..n_samples {
        let sigma = SimplexPoint::random(rho.dim(), &mut rng).to_state();
        best = best.min(relative_entropy(rho, &sigma)?);
    }
    Ok(
        VerificationRecord::inequality("cr-minimum", at_dephased, best, 1e-9)
            .with_trial(0, seed)
            .with_input(&[rho.matrix()]),
    )
}

/// Closed-form geometric coherence of a qubit, `½(1 − √(1 − 4|ρ₀₁|²))`.
pub fn c_geometric_qubit(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "closed form needs a qubit, got dimension {}",
            rho.dim()
        )));
    }
    let r2 = rho.get(0, 1).norm_sqr();
    Ok(0.5 * (1.0 - (1.0 - 4.0 * r2).max(0.0).sqrt()))
}

/// Result of maximizing fidelity to incoherent states.
#[derive(Debug, Clone)]
pub struct GeometricCoherence {
    /// `1 − F*`.
    pub value: f64,
    pub max_fidelity: f64,
    /// Populations of a closest incoherent state.
    pub closest: SimplexPoint,
    pub iterations: usize,
}

/// `max_σ∈I F(ρ, σ)` and its maximizer, by projected gradient ascent over
/// diagonal states (exact for pure `ρ`).
pub fn geometric_coherence(
    rho: &DensityMatrix,
    opts: &OptimizerOptions,
) -> Result<GeometricCoherence> {
    let support: Vec<usize> = (0..rho.dim()).collect();
    let best = max_fidelity_on_support(rho, &support, opts)?;
    Ok(GeometricCoherence {
        value: clip(1.0 - best.value).max(0.0),
        max_fidelity: best.value,
        closest: best.point,
        iterations: best.iterations,
    })
}

/// Geometric coherence `1 − max_σ∈I F(ρ, σ)` in any dimension.
pub fn c_geometric(rho: &DensityMatrix, opts: &OptimizerOptions) -> Result<f64> {
    geometric_coherence(rho, opts).map(|g| g.value)
}

/// Nonincreasing functions of fidelity used as distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FidelityDistance {
    /// `1 − F`
    Geometric,
    /// `2(1 − √F)`
    Bures,
    /// `√(1 − F)`
    Groverian,
}

impl FidelityDistance {
    pub fn apply(self, f: f64) -> f64 {
        let f = f.clamp(0.0, 1.0);
        match self {
            Self::Geometric => 1.0 - f,
            Self::Bures => 2.0 * (1.0 - f.sqrt()),
            Self::Groverian => (1.0 - f).sqrt(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Geometric => "geometric",
            Self::Bures => "bures",
            Self::Groverian => "groverian",
        }
    }
}

/// `min_σ∈I g(F(ρ, σ))`. All supported `g` are nonincreasing, so the
/// minimizer is the single fidelity maximizer.
pub fn c_gf(rho: &DensityMatrix, g: FidelityDistance, opts: &OptimizerOptions) -> Result<f64> {
    let support: Vec<usize> = (0..rho.dim()).collect();
    let best = max_fidelity_on_support(rho, &support, opts)?;
    Ok(g.apply(best.value))
}

/// The coherence monotones covered by the property suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoherenceMeasure {
    L1,
    RelEntropy,
    Geometric,
}

impl CoherenceMeasure {
    pub const ALL: [CoherenceMeasure; 3] = [Self::L1, Self::RelEntropy, Self::Geometric];

    /// Geometric coherence of a qubit uses the closed form.
    pub fn evaluate(self, rho: &DensityMatrix, opts: &OptimizerOptions) -> Result<f64> {
        match self {
            Self::L1 => Ok(c_l1(rho)),
            Self::RelEntropy => Ok(c_rel_entropy(rho)),
            Self::Geometric if rho.dim() == 2 => c_geometric_qubit(rho),
            Self::Geometric => c_geometric(rho, opts),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::L1 => "l1",
            Self::RelEntropy => "rel_entropy",
            Self::Geometric => "geometric",
        }
    }
}

impl fmt::Display for CoherenceMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CoherenceMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(Self::L1),
            "rel_entropy" | "rel-entropy" | "cr" => Ok(Self::RelEntropy),
            "geometric" | "cg" => Ok(Self::Geometric),
            other => Err(Error::InvalidArgument(format!(
                "unknown coherence measure `{other}`"
            ))),
        }
    }
}
