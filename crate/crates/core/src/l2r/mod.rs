//! Linear ranking models: pairwise and listwise max-margin training,
//! ranking, evaluation metrics and query-level cross-validation.

mod cv;
mod eval;
mod listwise;
mod pairwise;
pub mod solver;

pub use cv::{cross_validate, partition_queries, select_c, train, CvConfig, TrainerConfig};
pub use eval::{
    average_precision, evaluate_pool, mean_average_precision, precision_at_k, EvalReport, FoldEval, QueryEval,
    CUTOFFS,
};
pub use listwise::{
    find_most_violated, joint_feature_map, train_listwise, train_listwise_traced, Labeling, ListwiseConfig,
    ListwiseTrace, MostViolated,
};
pub use pairwise::{pairwise_objective, train_pairwise, PairwiseConfig};

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::features::{FeatureVector, QueryPool};
use crate::scalar::{dot, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Pairwise,
    Listwise,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Pairwise => "pairwise",
            ModelKind::Listwise => "listwise",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "pairwise" => Ok(ModelKind::Pairwise),
            "listwise" => Ok(ModelKind::Listwise),
            other => Err(Error::InvalidArgument(format!("unknown trainer {other:?} (pairwise|listwise)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingMeta<T> {
    pub iterations: usize,
    pub objective: T,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankingModel<T = f64> {
    pub kind: ModelKind,
    pub c: f64,
    pub weights: Vec<T>,
    pub meta: TrainingMeta<T>,
}

impl<T: Scalar> RankingModel<T> {
    pub fn zeros(kind: ModelKind, dim: usize) -> Self {
        RankingModel {
            kind,
            c: 1.0,
            weights: vec![T::zero(); dim],
            meta: TrainingMeta {
                iterations: 0,
                objective: T::zero(),
                converged: true,
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn score(&self, v: &FeatureVector<T>) -> Result<T> {
        self.score_values(&v.values)
    }

    pub fn score_values(&self, values: &[T]) -> Result<T> {
        if values.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                actual: values.len(),
            });
        }
        Ok(dot(&self.weights, values))
    }

    /// Pool members by descending score, ties by ascending author id.
    pub fn rank(&self, pool: &QueryPool<T>) -> Result<Vec<(String, T)>> {
        let mut scored = pool
            .vectors
            .iter()
            .map(|v| Ok((v.author_id.clone(), self.score(v)?)))
            .collect::<Result<Vec<_>>>()?;
        sort_ranked(&mut scored);
        Ok(scored)
    }

    /// Relevance labels of the pool in ranked order.
    pub fn ranked_labels(&self, pool: &QueryPool<T>) -> Result<Vec<bool>> {
        let mut scored = pool
            .vectors
            .iter()
            .map(|v| Ok((v.author_id.clone(), self.score(v)?, v.is_relevant())))
            .collect::<Result<Vec<_>>>()?;
        scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal).then_with(|| a.0.cmp(&b.0)));
        Ok(scored.into_iter().map(|s| s.2).collect())
    }

    /// Four lines: kind, C, weights, metadata.
    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", self.kind)?;
        writeln!(w, "{}", self.c)?;
        let weights: Vec<String> = self.weights.iter().map(|x| x.to_string()).collect();
        writeln!(w, "{}", weights.join(" "))?;
        writeln!(
            w,
            "iterations={} objective={} converged={}",
            self.meta.iterations, self.meta.objective, self.meta.converged
        )
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("model text is utf-8")
    }

    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let lines: Vec<&str> = text.lines().collect();
        if lines.len() != 4 {
            return Err(Error::parse(source, lines.len().min(4), format!("model file needs 4 lines, found {}", lines.len())));
        }
        let kind: ModelKind = lines[0].parse().map_err(|e: Error| Error::parse(source, 1, e.to_string()))?;
        let c: f64 = lines[1]
            .trim()
            .parse()
            .map_err(|_| Error::parse(source, 2, format!("bad C value {:?}", lines[1])))?;
        let weights = lines[2]
            .split_whitespace()
            .map(|t| t.parse::<T>().map_err(|_| Error::parse(source, 3, format!("bad weight {t:?}"))))
            .collect::<Result<Vec<T>>>()?;
        let mut iterations = None;
        let mut objective = None;
        let mut converged = None;
        for field in lines[3].split_whitespace() {
            let bad = || Error::parse(source, 4, format!("bad metadata field {field:?}"));
            let (k, v) = field.split_once('=').ok_or_else(bad)?;
            match k {
                "iterations" => iterations = Some(v.parse().map_err(|_| bad())?),
                "objective" => objective = Some(v.parse().map_err(|_| bad())?),
                "converged" => converged = Some(v.parse().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        }
        let missing = || Error::parse(source, 4, "metadata needs iterations, objective and converged");
        Ok(RankingModel {
            kind,
            c,
            weights,
            meta: TrainingMeta {
                iterations: iterations.ok_or_else(missing)?,
                objective: objective.ok_or_else(missing)?,
                converged: converged.ok_or_else(missing)?,
            },
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RankingModel::parse(&text, &path.display().to_string())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// Descending score, ties by ascending id.
pub fn sort_ranked<T: Scalar>(items: &mut [(String, T)]) {
    items.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal).then_with(|| a.0.cmp(&b.0)));
}

/// Checks that all pools share one dimension and returns it.
pub(crate) fn common_dim<T: Scalar>(pools: &[QueryPool<T>]) -> Result<usize> {
    let mut dim = None;
    for p in pools {
        for v in &p.vectors {
            match dim {
                None => dim = Some(v.values.len()),
                Some(d) if d != v.values.len() => {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        actual: v.values.len(),
                    })
                }
                _ => {}
            }
        }
    }
    dim.ok_or_else(|| Error::InvalidArgument("no feature vectors".into()))
}
