use crate::error::{Error, Result};
use crate::features::QueryPool;
use crate::scalar::{dot, norm_sq, Scalar};

use super::solver::{DualProblem, SolverConfig};
use super::{common_dim, ModelKind, RankingModel, TrainingMeta};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PairwiseConfig {
    pub solver: SolverConfig,
}

/// Difference vectors `x_u - x_v` for every relevant `u` and non-relevant
/// `v` of the same query.
fn preference_pairs<T: Scalar>(pools: &[QueryPool<T>]) -> Vec<Vec<T>> {
    let mut pairs = Vec::new();
    for pool in pools {
        for u in pool.vectors.iter().filter(|v| v.is_relevant()) {
            for v in pool.vectors.iter().filter(|v| !v.is_relevant()) {
                pairs.push(u.values.iter().zip(&v.values).map(|(&a, &b)| a - b).collect());
            }
        }
    }
    pairs
}

/// `1/2 |w|^2 + C * sum_pairs max(0, 1 - w.(x_u - x_v))`.
pub fn pairwise_objective<T: Scalar>(pools: &[QueryPool<T>], weights: &[T], c: f64) -> T {
    let hinge = preference_pairs(pools)
        .iter()
        .map(|d| (T::one() - dot(weights, d)).max(T::zero()))
        .fold(T::zero(), |a, b| a + b);
    T::of(0.5) * norm_sq(weights) + T::of(c) * hinge
}

/// Pairwise hinge-loss ranking SVM, solved exactly in the dual.
pub fn train_pairwise<T: Scalar>(pools: &[QueryPool<T>], c: f64, cfg: &PairwiseConfig) -> Result<RankingModel<T>> {
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("C must be positive, got {c}")));
    }
    let dim = common_dim(pools)?;
    let pairs = preference_pairs(pools);
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("no relevant/non-relevant pairs to train on".into()));
    }
    let mut problem = DualProblem::new(dim, vec![T::of(c); pairs.len()]);
    for (g, d) in pairs.into_iter().enumerate() {
        problem.push(d, T::one(), g);
    }
    let info = problem.solve(&cfg.solver);
    if !info.converged {
        log::warn!("pairwise solver stopped at {} epochs with gap {}", info.epochs, info.primal - info.dual);
    }
    let weights = problem.weights().to_vec();
    Ok(RankingModel {
        kind: ModelKind::Pairwise,
        c,
        meta: TrainingMeta {
            iterations: info.epochs,
            objective: pairwise_objective(pools, &weights, c),
            converged: info.converged,
        },
        weights,
    })
}
