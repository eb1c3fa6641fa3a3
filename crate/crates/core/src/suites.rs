//! Seeded verification suites behind `verify <suite>`.
//!
//! Trial `t` draws everything from `derive_seed(seed, t)`, so each record can
//! be replayed alone and results do not depend on scheduling.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use crate::channels::{convexity_suite, monotonicity_suite, random_incoherent_channel};
use crate::coherence::{c_geometric_qubit, c_rel_entropy_is_minimum, CoherenceMeasure};
use crate::conversion::{verify_equality_cr, verify_theorem1, verify_theorem2, MeasurePair};
use crate::entanglement::{concurrence_two_qubit, e_geometric_mc, e_geometric_two_qubit, mc_embed};
use crate::error::{Error, Result};
use crate::report::VerificationRecord;
use crate::simplex::OptimizerOptions;
use crate::states::{derive_seed, random_diagonal, random_mixed, rng_from_seed, DensityMatrix};

/// Samples drawn per state by the `cr-minimum` suite.
pub const CR_MINIMUM_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Theorem1,
    Theorem2,
    CrEquality,
    Monotonicity,
    Convexity,
    QubitChain,
    CrMinimum,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Self::Theorem1,
        Self::Theorem2,
        Self::CrEquality,
        Self::Monotonicity,
        Self::Convexity,
        Self::QubitChain,
        Self::CrMinimum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Theorem1 => "theorem1",
            Self::Theorem2 => "theorem2",
            Self::CrEquality => "cr-equality",
            Self::Monotonicity => "monotonicity",
            Self::Convexity => "convexity",
            Self::QubitChain => "qubit-chain",
            Self::CrMinimum => "cr-minimum",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub dim: usize,
    /// Defaults to `dim`.
    pub ancilla_dim: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Incoherence threshold for `theorem2`.
    pub tol: f64,
    /// Measure name; `None` selects the suite default.
    pub measure: Option<String>,
    pub optimizer: OptimizerOptions,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            dim: 2,
            ancilla_dim: None,
            trials: 100,
            seed: 0,
            tol: 1e-10,
            measure: None,
            optimizer: OptimizerOptions::default(),
        }
    }
}

impl SuiteConfig {
    fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidArgument("--dim must be positive".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("--trials must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument("--tol must be positive".into()));
        }
        Ok(())
    }

    fn coherence_measures(&self) -> Result<Vec<CoherenceMeasure>> {
        match self.measure.as_deref() {
            None | Some("all") => Ok(CoherenceMeasure::ALL.to_vec()),
            Some(m) => Ok(vec![m.parse()?]),
        }
    }
}

/// A random state of random rank.
pub fn random_trial_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<DensityMatrix> {
    let rank = rng.random_range(1..=dim);
    random_mixed(dim, rank, rng.random())
}

fn per_trial<F>(cfg: &SuiteConfig, f: F) -> Result<Vec<VerificationRecord>>
where
    F: Fn(u64) -> Result<Vec<VerificationRecord>> + Sync,
{
    let chunks: Vec<Result<Vec<VerificationRecord>>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let s = derive_seed(cfg.seed, t as u64);
            f(s).map(|rs| rs.into_iter().map(|r| r.with_trial(t, s)).collect())
        })
        .collect();
    let mut out = Vec::new();
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<VerificationRecord>> {
    cfg.validate()?;
    let d = cfg.dim;
    let opts = cfg.optimizer;
    match suite {
        Suite::Theorem1 => {
            let d_a = cfg.ancilla_dim.unwrap_or(d);
            let pair = match cfg.measure.as_deref() {
                None if d == 2 && d_a == 2 => MeasurePair::Geometric,
                None => MeasurePair::RelEntropyMcFamily,
                Some(m) => m.parse()?,
            };
            per_trial(cfg, |s| {
                let mut rng = rng_from_seed(s);
                let rho = random_trial_state(d, &mut rng)?;
                let n_kraus = rng.random_range(1..=4);
                let ch = random_incoherent_channel(d * d_a, n_kraus, rng.random())?;
                Ok(vec![verify_theorem1(&rho, &ch, d_a, pair)?])
            })
        }
        Suite::Theorem2 => per_trial(cfg, |s| {
            let mut rng = rng_from_seed(s);
            // alternate incoherent and generic inputs
            let rho = if rng.random_bool(0.5) {
                random_diagonal(d, rng.random())?
            } else {
                random_trial_state(d, &mut rng)?
            };
            Ok(vec![verify_theorem2(&rho, cfg.tol)?])
        }),
        Suite::CrEquality => per_trial(cfg, |s| {
            let rho = random_trial_state(d, &mut rng_from_seed(s))?;
            Ok(vec![verify_equality_cr(&rho)?])
        }),
        Suite::CrMinimum => per_trial(cfg, |s| {
            let mut rng = rng_from_seed(s);
            let rho = random_trial_state(d, &mut rng)?;
            Ok(vec![c_rel_entropy_is_minimum(
                &rho,
                CR_MINIMUM_SAMPLES,
                rng.random(),
            )?])
        }),
        Suite::QubitChain => {
            if d != 2 {
                return Err(Error::InvalidArgument("qubit-chain needs --dim 2".into()));
            }
            per_trial(cfg, |s| {
                let rho = random_trial_state(2, &mut rng_from_seed(s))?;
                Ok(qubit_chain_records(&rho, &opts)?.to_vec())
            })
        }
        Suite::Monotonicity | Suite::Convexity => {
            let mut out = Vec::new();
            for m in cfg.coherence_measures()? {
                let rs = if suite == Suite::Monotonicity {
                    monotonicity_suite(m, d, cfg.trials, cfg.seed, &opts)?
                } else {
                    convexity_suite(m, d, cfg.trials, cfg.seed, &opts)?
                };
                out.extend(rs);
            }
            Ok(out)
        }
    }
}

/// `C_g(ρ) = E_g(embed ρ)` by the two-qubit closed form and by the optimizer,
/// and `C(embed ρ) = 2|ρ₀₁|`.
pub fn qubit_chain_records(
    rho: &DensityMatrix,
    opts: &OptimizerOptions,
) -> Result<[VerificationRecord; 3]> {
    let mc = mc_embed(rho);
    let sa = mc.to_bipartite();
    let cg = c_geometric_qubit(rho)?;
    let eg = e_geometric_two_qubit(&sa)?;
    let eg_opt = e_geometric_mc(&mc, opts)?;
    let conc = concurrence_two_qubit(&sa)?;
    let input = [rho.matrix()];
    Ok([
        VerificationRecord::equality("qubit-chain:e_g", eg, cg, 1e-6).with_input(&input),
        VerificationRecord::equality("qubit-chain:e_g_mc", eg_opt, cg, 1e-6).with_input(&input),
        VerificationRecord::equality(
            "qubit-chain:concurrence",
            conc,
            2.0 * rho.get(0, 1).norm(),
            1e-9,
        )
        .with_input(&input),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_parse() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("theorem3".parse::<Suite>().is_err());
    }

    #[test]
    fn every_suite_passes_small_runs() {
        for suite in Suite::ALL {
            let cfg = SuiteConfig {
                trials: 6,
                seed: 3,
                ..SuiteConfig::default()
            };
            let rs = run_suite(suite, &cfg).unwrap();
            assert!(!rs.is_empty());
            assert!(rs.iter().all(|r| r.pass), "{suite}: {rs:?}");
            assert_eq!(rs, run_suite(suite, &cfg).unwrap());
        }
        let cfg = SuiteConfig {
            dim: 3,
            trials: 4,
            ..SuiteConfig::default()
        };
        for suite in [Suite::Theorem1, Suite::Theorem2, Suite::CrEquality] {
            assert!(
                run_suite(suite, &cfg).unwrap().iter().all(|r| r.pass),
                "{suite}"
            );
        }
        assert!(run_suite(Suite::QubitChain, &cfg).is_err());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let cfg = SuiteConfig {
            trials: 0,
            ..SuiteConfig::default()
        };
        assert!(run_suite(Suite::CrEquality, &cfg).is_err());
        let cfg = SuiteConfig {
            measure: Some("l7".into()),
            ..SuiteConfig::default()
        };
        assert!(run_suite(Suite::Convexity, &cfg).is_err());
    }
}
