//! Structural max-margin training against the average-precision loss,
//! using the pairwise joint feature map over relevant/non-relevant orderings
//! and a cutting-plane working set per query.

use crate::error::{Error, Result};
use crate::features::QueryPool;
use crate::scalar::{dot, norm_sq, Scalar};

use super::solver::{DualProblem, SolverConfig};
use super::{common_dim, ModelKind, RankingModel, TrainingMeta};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ListwiseConfig {
    /// A constraint enters the working set only if it is violated by more
    /// than this.
    pub epsilon: f64,
    pub max_iter: usize,
    pub solver: SolverConfig,
}

impl Default for ListwiseConfig {
    fn default() -> Self {
        ListwiseConfig {
            epsilon: 1e-3,
            max_iter: 200,
            solver: SolverConfig {
                tol: 1e-7,
                max_epochs: 5_000,
            },
        }
    }
}

/// Relative order of every relevant/non-relevant pair of a pool.
///
/// `above[i * nonrel + j]` is true when the `i`-th relevant vector (pool
/// order) is ranked above the `j`-th non-relevant one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Labeling {
    relevant: usize,
    nonrelevant: usize,
    above: Vec<bool>,
}

impl Labeling {
    /// The labeling induced by a full ranking of the pool (indices into
    /// `pool.vectors`, best first).
    pub fn from_order<T: Scalar>(pool: &QueryPool<T>, order: &[usize]) -> Self {
        let (rel, non) = split(pool);
        let mut pos = vec![0usize; pool.vectors.len()];
        for (p, &i) in order.iter().enumerate() {
            pos[i] = p;
        }
        let mut above = Vec::with_capacity(rel.len() * non.len());
        for &u in &rel {
            for &v in &non {
                above.push(pos[u] < pos[v]);
            }
        }
        Labeling {
            relevant: rel.len(),
            nonrelevant: non.len(),
            above,
        }
    }

    /// The ground truth: every relevant vector above every non-relevant one.
    pub fn truth<T: Scalar>(pool: &QueryPool<T>) -> Self {
        let (rel, non) = split(pool);
        Labeling {
            relevant: rel.len(),
            nonrelevant: non.len(),
            above: vec![true; rel.len() * non.len()],
        }
    }

    pub fn is_above(&self, rel: usize, non: usize) -> bool {
        self.above[rel * self.nonrelevant + non]
    }

    /// AP of any ranking consistent with this labeling.
    pub fn average_precision(&self) -> f64 {
        let mut below_counts: Vec<usize> = (0..self.relevant)
            .map(|i| (0..self.nonrelevant).filter(|&j| !self.is_above(i, j)).count())
            .collect();
        below_counts.sort_unstable();
        let r = self.relevant as f64;
        below_counts
            .iter()
            .enumerate()
            .map(|(i, &k)| (i + 1) as f64 / (i + 1 + k) as f64)
            .sum::<f64>()
            / r
    }
}

fn split<T: Scalar>(pool: &QueryPool<T>) -> (Vec<usize>, Vec<usize>) {
    let rel = (0..pool.vectors.len()).filter(|&i| pool.vectors[i].is_relevant()).collect();
    let non = (0..pool.vectors.len()).filter(|&i| !pool.vectors[i].is_relevant()).collect();
    (rel, non)
}

/// `Psi(y, x) = 1/(|R||N|) sum_{u in R, v in N} y_uv (x_u - x_v)` with
/// `y_uv = +1` when `u` is ranked above `v` and `-1` otherwise.
pub fn joint_feature_map<T: Scalar>(pool: &QueryPool<T>, labeling: &Labeling) -> Vec<T> {
    let (rel, non) = split(pool);
    let dim = pool.dim();
    let mut psi = vec![T::zero(); dim];
    for (i, &u) in rel.iter().enumerate() {
        for (j, &v) in non.iter().enumerate() {
            let sign = if labeling.is_above(i, j) { T::one() } else { -T::one() };
            let (xu, xv) = (&pool.vectors[u].values, &pool.vectors[v].values);
            for k in 0..dim {
                psi[k] = psi[k] + sign * (xu[k] - xv[k]);
            }
        }
    }
    let norm = T::of_usize(rel.len() * non.len());
    psi.iter_mut().for_each(|x| *x = *x / norm);
    psi
}

#[derive(Clone, Debug, PartialEq)]
pub struct MostViolated<T> {
    pub labeling: Labeling,
    pub psi: Vec<T>,
    /// `1 - AP`
    pub loss: T,
    /// `1 - AP + w.Psi`
    pub violation: T,
}

/// The labeling maximizing `1 - AP(y) + w.Psi(y, x)`.
///
/// Relevant and non-relevant vectors are each sorted by score; the search
/// places each relevant vector, in score order, after some number of the
/// sorted non-relevant ones. Those counts must be non-decreasing, which a
/// prefix-maximum recursion over (relevant item, count) enforces in
/// `O(|R| |N|)`.
pub fn find_most_violated<T: Scalar>(pool: &QueryPool<T>, weights: &[T]) -> Result<MostViolated<T>> {
    let (rel, non) = split(pool);
    if rel.is_empty() || non.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "query {} needs relevant and non-relevant vectors",
            pool.query_id
        )));
    }
    if pool.dim() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            actual: pool.dim(),
        });
    }
    let score = |i: usize| dot(weights, &pool.vectors[i].values);
    let by_score = |ids: &[usize]| {
        let mut s: Vec<(usize, T)> = ids.iter().enumerate().map(|(k, &i)| (k, score(i))).collect();
        s.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(&b.0)));
        s
    };
    let rs = by_score(&rel);
    let ns = by_score(&non);
    let (r, n) = (rel.len(), non.len());
    let mut prefix = vec![T::zero(); n + 1];
    for k in 0..n {
        prefix[k + 1] = prefix[k] + ns[k].1;
    }
    let total = prefix[n];
    let rt = T::of_usize(r);
    let scale = T::of_usize(r * n);
    let two = T::of(2.0);
    // gain of placing the i-th (1-based) relevant item below k non-relevant ones
    let gain = |i: usize, k: usize| {
        let s = rs[i - 1].1;
        let ap = T::of_usize(i) / T::of_usize(i + k) / rt;
        let pairs = (T::of_usize(n) - two * T::of_usize(k)) * s - (total - two * prefix[k]);
        pairs / scale - ap
    };

    // from[i][k]: best count for item i-1 given item i uses count k
    let mut from: Vec<Vec<usize>> = Vec::with_capacity(r);
    let mut prev = vec![T::zero(); n + 1];
    for i in 1..=r {
        let mut cur = vec![T::zero(); n + 1];
        let mut back = vec![0usize; n + 1];
        let mut best = T::neg_infinity();
        let mut arg = 0;
        for k in 0..=n {
            if prev[k] > best {
                best = prev[k];
                arg = k;
            }
            cur[k] = gain(i, k) + best;
            back[k] = arg;
        }
        from.push(back);
        prev = cur;
    }
    let mut k_last = 0;
    for k in 1..=n {
        if prev[k] > prev[k_last] {
            k_last = k;
        }
    }
    let mut counts = vec![0usize; r];
    counts[r - 1] = k_last;
    for i in (1..r).rev() {
        counts[i - 1] = from[i][counts[i]];
    }

    let mut above = vec![false; r * n];
    for (i, &(rk, _)) in rs.iter().enumerate() {
        for (j, &(nk, _)) in ns.iter().enumerate() {
            above[rk * n + nk] = j >= counts[i];
        }
    }
    let labeling = Labeling {
        relevant: r,
        nonrelevant: n,
        above,
    };
    let psi = joint_feature_map(pool, &labeling);
    let loss = T::one() - T::of(labeling.average_precision());
    let violation = loss + dot(weights, &psi);
    Ok(MostViolated {
        labeling,
        psi,
        loss,
        violation,
    })
}

/// Bounds recorded at every cutting-plane iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct ListwiseTrace<T> {
    /// Best full objective found so far, evaluated with exact most-violated
    /// constraints; non-increasing.
    pub upper: Vec<T>,
    /// Optimum of the restricted problem over the working set.
    pub lower: Vec<T>,
    pub constraints: usize,
}

pub fn train_listwise<T: Scalar>(pools: &[QueryPool<T>], c: f64, cfg: &ListwiseConfig) -> Result<RankingModel<T>> {
    train_listwise_traced(pools, c, cfg).map(|(m, _)| m)
}

/// Cutting-plane training of
/// `1/2 |w|^2 + C/n sum_q max_y (1 - AP(y) + w.Psi(y) - w.Psi(y*))`.
pub fn train_listwise_traced<T: Scalar>(
    pools: &[QueryPool<T>],
    c: f64,
    cfg: &ListwiseConfig,
) -> Result<(RankingModel<T>, ListwiseTrace<T>)> {
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("C must be positive, got {c}")));
    }
    let dim = common_dim(pools)?;
    let pools: Vec<&QueryPool<T>> = pools.iter().filter(|p| p.is_trainable()).collect();
    if pools.is_empty() {
        return Err(Error::InvalidArgument("no query has both relevant and non-relevant vectors".into()));
    }
    let cap = T::of(c) / T::of_usize(pools.len());
    let truth: Vec<Vec<T>> = pools.iter().map(|p| joint_feature_map(p, &Labeling::truth(p))).collect();
    let mut working: Vec<Vec<Labeling>> = vec![Vec::new(); pools.len()];
    let mut problem = DualProblem::new(dim, vec![cap; pools.len()]);
    let eps = T::of(cfg.epsilon);

    let mut w = vec![T::zero(); dim];
    let mut best_w = w.clone();
    let mut best = T::infinity();
    let mut trace = ListwiseTrace {
        upper: Vec::new(),
        lower: Vec::new(),
        constraints: 0,
    };
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        iterations += 1;
        let slack = problem.slacks(&w);
        let mut objective = T::of(0.5) * norm_sq(&w);
        let mut added = 0;
        for (q, pool) in pools.iter().enumerate() {
            let mv = find_most_violated(pool, &w)?;
            let hinge = mv.violation - dot(&w, &truth[q]);
            objective = objective + cap * hinge.max(T::zero());
            if hinge > slack[q] + eps && !working[q].contains(&mv.labeling) {
                let delta: Vec<T> = truth[q].iter().zip(&mv.psi).map(|(&a, &b)| a - b).collect();
                problem.push(delta, mv.loss, q);
                working[q].push(mv.labeling);
                added += 1;
            }
        }
        if objective < best {
            best = objective;
            best_w = w.clone();
        }
        trace.upper.push(best);
        if added == 0 {
            converged = true;
            break;
        }
        let info = problem.solve(&cfg.solver);
        trace.lower.push(info.dual);
        w = problem.weights().to_vec();
    }
    if !converged {
        log::warn!("listwise training hit the iteration cap ({})", cfg.max_iter);
    }
    trace.constraints = problem.num_constraints();
    Ok((
        RankingModel {
            kind: ModelKind::Listwise,
            c,
            weights: best_w,
            meta: TrainingMeta {
                iterations,
                objective: best,
                converged,
            },
        },
        trace,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureVector;

    fn pool(rows: &[(Vec<f64>, bool)]) -> QueryPool<f64> {
        QueryPool {
            query_id: "q".into(),
            vectors: rows
                .iter()
                .enumerate()
                .map(|(i, (v, l))| FeatureVector {
                    query_id: "q".into(),
                    author_id: format!("a{i}"),
                    values: v.clone(),
                    label: Some(*l),
                })
                .collect(),
        }
    }

    #[test]
    fn ap_of_labelings() {
        let p = pool(&[(vec![0.0], true), (vec![0.0], false), (vec![0.0], true), (vec![0.0], false)]);
        // ranking [rel, non, rel, non]
        let l = Labeling::from_order(&p, &[0, 1, 2, 3]);
        assert!((l.average_precision() - (1.0 + 2.0 / 3.0) / 2.0).abs() < 1e-12);
        assert_eq!(Labeling::truth(&p).average_precision(), 1.0);
    }

    #[test]
    fn zero_weights_pick_the_worst_ap() {
        let p = pool(&[(vec![1.0], true), (vec![2.0], true), (vec![0.0], false), (vec![3.0], false), (vec![1.0], false)]);
        let mv = find_most_violated(&p, &[0.0]).unwrap();
        // both relevant ranked last: AP = (1/4 + 2/5) / 2
        let worst = (1.0 / 4.0 + 2.0 / 5.0) / 2.0;
        assert!((mv.loss - (1.0 - worst)).abs() < 1e-12);
        assert!((mv.violation - mv.loss).abs() < 1e-12);
    }

    #[test]
    fn large_margin_leaves_nothing_violated() {
        let p = pool(&[(vec![10.0], true), (vec![9.0], true), (vec![0.0], false), (vec![-1.0], false)]);
        let w = [1.0];
        let mv = find_most_violated(&p, &w).unwrap();
        let truth = joint_feature_map(&p, &Labeling::truth(&p));
        // best competitor does not beat the truth
        assert!(mv.violation - dot(&w, &truth) <= 1e-12);
        assert_eq!(mv.labeling, Labeling::truth(&p));
    }

    #[test]
    fn errors() {
        let p = pool(&[(vec![1.0], true)]);
        assert!(find_most_violated(&p, &[1.0]).is_err());
        let p = pool(&[(vec![1.0], true), (vec![0.0], false)]);
        assert!(find_most_violated(&p, &[1.0, 2.0]).is_err());
        assert!(train_listwise(&[p], 0.0, &ListwiseConfig::default()).is_err());
    }

    #[test]
    fn realizable_pool_reaches_perfect_map() {
        let p = pool(&[
            (vec![0.9, 0.1], true),
            (vec![0.8, 0.7], true),
            (vec![0.2, 0.9], false),
            (vec![0.1, 0.3], false),
            (vec![0.5, 0.5], false),
        ]);
        let (m, trace) = train_listwise_traced(&[p.clone()], 10.0, &ListwiseConfig::default()).unwrap();
        assert!(m.meta.converged);
        let labels = m.ranked_labels(&p).unwrap();
        assert_eq!(labels, [true, true, false, false, false]);
        for pair in trace.upper.windows(2) {
            assert!(pair[1] <= pair[0]);
        }
    }
}
