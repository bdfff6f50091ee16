use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::features::QueryPool;
use crate::scalar::Scalar;

use super::eval::{evaluate_pool, mean_average_precision, EvalReport, QueryEval};
use super::{train_listwise, train_pairwise, ListwiseConfig, ModelKind, PairwiseConfig, RankingModel};

#[derive(Clone, Debug, Default)]
pub struct TrainerConfig {
    pub kind: Option<ModelKind>,
    pub pairwise: PairwiseConfig,
    pub listwise: ListwiseConfig,
}

impl TrainerConfig {
    pub fn new(kind: ModelKind) -> Self {
        TrainerConfig {
            kind: Some(kind),
            ..Default::default()
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind.unwrap_or(ModelKind::Pairwise)
    }
}

pub fn train<T: Scalar>(cfg: &TrainerConfig, pools: &[QueryPool<T>], c: f64) -> Result<RankingModel<T>> {
    match cfg.kind() {
        ModelKind::Pairwise => train_pairwise(pools, c, &cfg.pairwise),
        ModelKind::Listwise => train_listwise(pools, c, &cfg.listwise),
    }
}

#[derive(Clone, Debug)]
pub struct CvConfig {
    pub folds: usize,
    pub c_grid: Vec<f64>,
    pub seed: u64,
    /// Folds of the nested split used to pick C on training queries.
    pub inner_folds: usize,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 4,
            c_grid: vec![0.01, 0.1, 1.0, 10.0],
            seed: 0,
            inner_folds: 3,
        }
    }
}

/// Assigns queries to folds: seeded shuffle, then round-robin. Returns the
/// pool indices of each fold, each sorted ascending.
pub fn partition_queries(num_queries: usize, folds: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if folds < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 folds, got {folds}")));
    }
    if num_queries < folds {
        return Err(Error::Validation(format!("{num_queries} queries cannot fill {folds} folds")));
    }
    let mut order: Vec<usize> = (0..num_queries).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut out = vec![Vec::new(); folds];
    for (i, q) in order.into_iter().enumerate() {
        out[i % folds].push(q);
    }
    out.iter_mut().for_each(|f| f.sort_unstable());
    Ok(out)
}

fn split<T: Scalar>(pools: &[QueryPool<T>], test: &[usize]) -> (Vec<QueryPool<T>>, Vec<QueryPool<T>>) {
    let mut train = Vec::new();
    let mut held = Vec::new();
    for (i, p) in pools.iter().enumerate() {
        if test.binary_search(&i).is_ok() {
            held.push(p.clone());
        } else {
            train.push(p.clone());
        }
    }
    (train, held)
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty C grid".into()));
    }
    if let Some(c) = grid.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
        return Err(Error::InvalidArgument(format!("C must be positive, got {c}")));
    }
    Ok(())
}

fn map_of<T: Scalar>(model: &RankingModel<T>, pools: &[QueryPool<T>]) -> Result<f64> {
    let aps = pools
        .iter()
        .filter(|p| p.num_relevant() > 0)
        .map(|p| evaluate_pool(model, p, 0).map(|e| e.ap))
        .collect::<Result<Vec<_>>>()?;
    Ok(mean_average_precision(&aps))
}

/// Picks C from the grid by nested cross-validation over the given
/// (training) queries. Ties go to the smaller C. With too few queries to
/// split, training MAP decides.
pub fn select_c<T: Scalar>(trainer: &TrainerConfig, pools: &[QueryPool<T>], cv: &CvConfig) -> Result<f64> {
    validate_grid(&cv.c_grid)?;
    let mut grid = cv.c_grid.clone();
    grid.sort_by(|a, b| a.total_cmp(b));
    if grid.len() == 1 {
        return Ok(grid[0]);
    }
    let inner = cv.inner_folds.min(pools.len());
    let mut best = (f64::NEG_INFINITY, grid[0]);
    for &c in &grid {
        let score = if inner < 2 {
            map_of(&train(trainer, pools, c)?, pools)?
        } else {
            let folds = partition_queries(pools.len(), inner, cv.seed.wrapping_add(1))?;
            let mut aps = Vec::new();
            for test in &folds {
                let (tr, held) = split(pools, test);
                if !tr.iter().any(|p| p.is_trainable()) {
                    continue;
                }
                let model = train(trainer, &tr, c)?;
                for p in held.iter().filter(|p| p.num_relevant() > 0) {
                    aps.push(evaluate_pool(&model, p, 0)?.ap);
                }
            }
            mean_average_precision(&aps)
        };
        log::debug!("C={c}: inner MAP {score:.6}");
        if score > best.0 {
            best = (score, c);
        }
    }
    Ok(best.1)
}

/// Query-level k-fold cross-validation. Each fold picks C on its training
/// queries only, then evaluates on the held-out ones.
pub fn cross_validate<T: Scalar>(pools: &[QueryPool<T>], trainer: &TrainerConfig, cv: &CvConfig) -> Result<EvalReport> {
    validate_grid(&cv.c_grid)?;
    let folds = partition_queries(pools.len(), cv.folds, cv.seed)?;
    let mut queries: Vec<QueryEval> = Vec::new();
    let mut cs = Vec::with_capacity(folds.len());
    for (f, test) in folds.iter().enumerate() {
        let (tr, held) = split(pools, test);
        let c = select_c(trainer, &tr, cv)?;
        let model = train(trainer, &tr, c)?;
        log::info!("fold {}: C={c}, {} train / {} test queries", f + 1, tr.len(), held.len());
        for p in &held {
            queries.push(evaluate_pool(&model, p, f)?);
        }
        cs.push(c);
    }
    Ok(EvalReport::from_queries(queries, &cs))
}
