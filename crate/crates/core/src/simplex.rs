//! Concave maximization over the probability simplex by projected gradient
//! ascent, and the fidelity-to-diagonal-states objective it is used for.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, sqrt_state, ComplexMatrix, SPECTRAL_FLOOR};
use crate::states::{dirichlet_weights, rng_from_seed, DensityMatrix};

/// Tolerance on `Σ w = 1` for a [`SimplexPoint`].
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Central-difference step for numerical gradients.
pub const GRADIENT_STEP: f64 = 1e-6;

/// Probability vector parameterizing a diagonal (incoherent) state.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint {
    weights: Vec<f64>,
}

impl SimplexPoint {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument("empty simplex point".into()));
        }
        if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidArgument(
                "negative or non-finite weight".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::InvalidArgument(format!("weights sum to {total}")));
        }
        Ok(Self { weights })
    }

    pub fn uniform(dim: usize) -> Self {
        Self {
            weights: vec![1.0 / dim as f64; dim],
        }
    }

    pub fn vertex(dim: usize, k: usize) -> Self {
        let mut weights = vec![0.0; dim];
        weights[k] = 1.0;
        Self { weights }
    }

    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        Self {
            weights: dirichlet_weights(dim, rng),
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn to_state(&self) -> DensityMatrix {
        DensityMatrix::diagonal(&self.weights).expect("simplex point is a probability vector")
    }
}

/// Euclidean projection onto `{w : w ≥ 0, Σ w = 1}` (sort-and-threshold).
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cumulative += ui;
        let t = (cumulative - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    let mut w: Vec<f64> = v.iter().map(|&x| (x - theta).max(0.0)).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

/// Settings for the multistart projected gradient ascent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerOptions {
    /// Random Dirichlet starts, in addition to any warm start.
    pub starts: usize,
    pub max_iters: usize,
    /// Stop once an accepted step improves the objective by less than this.
    pub tol: f64,
    pub seed: u64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            starts: 20,
            max_iters: 5000,
            tol: 1e-10,
            seed: 0,
        }
    }
}

/// Best point found over all starts.
#[derive(Debug, Clone)]
pub struct SimplexMaximum {
    pub point: SimplexPoint,
    pub value: f64,
    /// Iterations summed over starts.
    pub iterations: usize,
    pub converged_starts: usize,
}

struct Ascent {
    point: Vec<f64>,
    value: f64,
    iterations: usize,
    converged: bool,
}

fn numerical_gradient(f: &impl Fn(&[f64]) -> f64, w: &[f64], fw: f64) -> Vec<f64> {
    let h = GRADIENT_STEP;
    let mut probe = w.to_vec();
    (0..w.len())
        .map(|k| {
            let orig = probe[k];
            probe[k] = orig + h;
            let up = f(&probe);
            let g = if orig >= h {
                probe[k] = orig - h;
                (up - f(&probe)) / (2.0 * h)
            } else {
                // one-sided near the boundary of the nonnegative orthant
                (up - fw) / h
            };
            probe[k] = orig;
            g
        })
        .collect()
}

fn ascend(f: &impl Fn(&[f64]) -> f64, start: Vec<f64>, opts: &OptimizerOptions) -> Ascent {
    let mut w = project_to_simplex(&start);
    let mut fw = f(&w);
    let mut step = 1.0;
    for it in 0..opts.max_iters {
        let g = numerical_gradient(f, &w, fw);
        let accepted = loop {
            let trial: Vec<f64> = w.iter().zip(&g).map(|(x, gx)| x + step * gx).collect();
            let cand = project_to_simplex(&trial);
            let ascent: f64 = cand
                .iter()
                .zip(&w)
                .zip(&g)
                .map(|((c, x), gx)| (c - x) * gx)
                .sum();
            if ascent <= 0.0 {
                // projected gradient vanishes: stationary point
                break None;
            }
            let fc = f(&cand);
            if fc >= fw + 1e-4 * ascent {
                break Some((cand, fc));
            }
            step *= 0.5;
            if step < 1e-18 {
                break None;
            }
        };
        let Some((cand, fc)) = accepted else {
            return Ascent {
                point: w,
                value: fw,
                iterations: it + 1,
                converged: true,
            };
        };
        let improvement = fc - fw;
        w = cand;
        fw = fc;
        if improvement < opts.tol {
            return Ascent {
                point: w,
                value: fw,
                iterations: it + 1,
                converged: true,
            };
        }
        step = (step * 2.0).min(1e6);
    }
    Ascent {
        point: w,
        value: fw,
        iterations: opts.max_iters,
        converged: false,
    }
}

/// Maximizes a concave `f` over the `dim`-simplex from `opts.starts` Dirichlet
/// starts plus an optional warm start.
///
/// Fails with [`Error::OptimizerNoConvergence`] only if every start exhausts
/// the iteration budget.
pub fn maximize_on_simplex(
    f: impl Fn(&[f64]) -> f64,
    dim: usize,
    warm_start: Option<&[f64]>,
    opts: &OptimizerOptions,
) -> Result<SimplexMaximum> {
    let mut rng = rng_from_seed(opts.seed);
    let mut starts: Vec<Vec<f64>> = warm_start.map(<[f64]>::to_vec).into_iter().collect();
    starts.extend((0..opts.starts).map(|_| dirichlet_weights(dim, &mut rng)));
    if starts.is_empty() {
        starts.push(vec![1.0 / dim as f64; dim]);
    }

    let mut best: Option<Ascent> = None;
    let mut iterations = 0;
    let mut converged_starts = 0;
    for start in starts {
        let run = ascend(&f, start, opts);
        iterations += run.iterations;
        if run.converged {
            converged_starts += 1;
        }
        if best.as_ref().is_none_or(|b| run.value > b.value) {
            best = Some(run);
        }
    }
    if converged_starts == 0 {
        return Err(Error::OptimizerNoConvergence {
            starts: opts.starts + usize::from(warm_start.is_some()),
        });
    }
    let mut best = best.expect("at least one start");
    // polish the winner with a tighter improvement threshold
    let polish = OptimizerOptions {
        tol: opts.tol * 1e-3,
        ..*opts
    };
    let refined = ascend(&f, best.point.clone(), &polish);
    iterations += refined.iterations;
    if refined.value > best.value {
        best = refined;
    }
    Ok(SimplexMaximum {
        point: SimplexPoint {
            weights: best.point,
        },
        value: best.value,
        iterations,
        converged_starts,
    })
}

/// `w ↦ F(ρ, Σ_k w_k |e_k><e_k|)` where `e_k` ranges over a chosen subset of
/// computational basis vectors.
///
/// Concave in `w` since fidelity is concave in each argument.
pub struct DiagonalFidelity {
    dim: usize,
    /// `c_k c_k†` for the columns `c_k` of `√ρ` at the support indices.
    rank_one_terms: Vec<ComplexMatrix>,
}

impl DiagonalFidelity {
    pub fn new(rho: &DensityMatrix, support: &[usize]) -> Result<Self> {
        if support.is_empty() || support.iter().any(|&k| k >= rho.dim()) {
            return Err(Error::InvalidArgument(
                "support indices out of range".into(),
            ));
        }
        let s = sqrt_state(rho)?;
        let rank_one_terms = support
            .iter()
            .map(|&k| {
                let c = s.column(k);
                ComplexMatrix::outer(&c, &c)
            })
            .collect();
        Ok(Self {
            dim: rho.dim(),
            rank_one_terms,
        })
    }

    pub fn support_len(&self) -> usize {
        self.rank_one_terms.len()
    }

    pub fn eval(&self, w: &[f64]) -> f64 {
        let mut m = ComplexMatrix::zeros(self.dim, self.dim);
        for (term, &wk) in self.rank_one_terms.iter().zip(w) {
            if wk == 0.0 {
                continue;
            }
            m = &m + &term.scale_real(wk);
        }
        let root_sum: f64 = hermitian_eigenvalues(&m, 1e-9)
            .expect("sum of Hermitian terms is Hermitian")
            .into_iter()
            .map(|l| if l <= SPECTRAL_FLOOR { 0.0 } else { l.sqrt() })
            .sum();
        (root_sum * root_sum).min(1.0)
    }
}

/// Largest fidelity between `rho` and states diagonal on `support`.
///
/// Pure `rho` takes an exact path: the objective is linear, so the maximum
/// sits at the vertex with the largest population.
pub fn max_fidelity_on_support(
    rho: &DensityMatrix,
    support: &[usize],
    opts: &OptimizerOptions,
) -> Result<SimplexMaximum> {
    let objective = DiagonalFidelity::new(rho, support)?;
    let pops: Vec<f64> = support.iter().map(|&k| rho.get(k, k).re).collect();
    if rho.is_pure(1e-12) {
        let (k, &value) = pops
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty support");
        return Ok(SimplexMaximum {
            point: SimplexPoint::vertex(support.len(), k),
            value: value.clamp(0.0, 1.0),
            iterations: 0,
            converged_starts: 0,
        });
    }
    let total: f64 = pops.iter().sum();
    let warm: Option<Vec<f64>> =
        (total > 0.0).then(|| pops.iter().map(|p| p.max(0.0) / total).collect());
    maximize_on_simplex(|w| objective.eval(w), support.len(), warm.as_deref(), opts)
}
