use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::features::QueryPool;
use crate::scalar::Scalar;

use super::RankingModel;

/// Rank cutoffs reported for precision.
pub const CUTOFFS: [usize; 4] = [5, 10, 15, 20];

/// `r(k) / k`; positions beyond the list count as non-relevant.
pub fn precision_at_k(ranked: &[bool], k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("precision cutoff must be at least 1".into()));
    }
    let hits = ranked.iter().take(k).filter(|&&r| r).count();
    Ok(hits as f64 / k as f64)
}

/// Mean of P@k over the ranks `k` holding relevant items.
pub fn average_precision(ranked: &[bool]) -> Result<f64> {
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, &rel) in ranked.iter().enumerate() {
        if rel {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    if hits == 0 {
        return Err(Error::InvalidArgument("average precision needs at least one relevant item".into()));
    }
    Ok(sum / hits as f64)
}

pub fn mean_average_precision(aps: &[f64]) -> f64 {
    if aps.is_empty() {
        return 0.0;
    }
    aps.iter().sum::<f64>() / aps.len() as f64
}

#[derive(Clone, Debug, PartialEq)]
pub struct QueryEval {
    pub query_id: String,
    pub fold: usize,
    pub ap: f64,
    /// Precision at each of [`CUTOFFS`].
    pub precision: [f64; 4],
}

pub fn evaluate_pool<T: Scalar>(model: &RankingModel<T>, pool: &QueryPool<T>, fold: usize) -> Result<QueryEval> {
    let ranked = model.ranked_labels(pool)?;
    let mut precision = [0.0; 4];
    for (p, &k) in precision.iter_mut().zip(&CUTOFFS) {
        *p = precision_at_k(&ranked, k)?;
    }
    Ok(QueryEval {
        query_id: pool.query_id.clone(),
        fold,
        ap: average_precision(&ranked)?,
        precision,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FoldEval {
    pub fold: usize,
    pub c: f64,
    pub map: f64,
    pub precision: [f64; 4],
    pub num_queries: usize,
}

/// Per-query, per-fold and overall results of a cross-validation run.
///
/// `map` and `precision` average over queries; `fold_map` and
/// `fold_precision` average the per-fold means. They coincide when folds
/// are equally sized.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub queries: Vec<QueryEval>,
    pub folds: Vec<FoldEval>,
    pub map: f64,
    pub precision: [f64; 4],
    pub fold_map: f64,
    pub fold_precision: [f64; 4],
}

fn mean_precision<'a>(rows: impl Iterator<Item = &'a [f64; 4]>) -> [f64; 4] {
    let mut sum = [0.0; 4];
    let mut n = 0usize;
    for r in rows {
        for (s, x) in sum.iter_mut().zip(r) {
            *s += x;
        }
        n += 1;
    }
    if n > 0 {
        sum.iter_mut().for_each(|s| *s /= n as f64);
    }
    sum
}

impl EvalReport {
    pub fn from_queries(queries: Vec<QueryEval>, fold_cs: &[f64]) -> Self {
        let folds: Vec<FoldEval> = fold_cs
            .iter()
            .enumerate()
            .map(|(f, &c)| {
                let rows: Vec<&QueryEval> = queries.iter().filter(|q| q.fold == f).collect();
                let aps: Vec<f64> = rows.iter().map(|q| q.ap).collect();
                FoldEval {
                    fold: f,
                    c,
                    map: mean_average_precision(&aps),
                    precision: mean_precision(rows.iter().map(|q| &q.precision)),
                    num_queries: rows.len(),
                }
            })
            .collect();
        let aps: Vec<f64> = queries.iter().map(|q| q.ap).collect();
        let fold_maps: Vec<f64> = folds.iter().map(|f| f.map).collect();
        EvalReport {
            map: mean_average_precision(&aps),
            precision: mean_precision(queries.iter().map(|q| &q.precision)),
            fold_map: mean_average_precision(&fold_maps),
            fold_precision: mean_precision(folds.iter().map(|f| &f.precision)),
            queries,
            folds,
        }
    }

    /// Tab-separated table: one row per query, one per fold, then the
    /// summary rows `ALL` (over queries) and `FOLD_MEAN` (over folds).
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("row\tfold\tC\tP@5\tP@10\tP@15\tP@20\tMAP\n");
        let row = |out: &mut String, name: &str, fold: &str, c: &str, p: &[f64; 4], m: f64| {
            let _ = writeln!(out, "{name}\t{fold}\t{c}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{:.4}", p[0], p[1], p[2], p[3], m);
        };
        for q in &self.queries {
            row(&mut out, &format!("query:{}", q.query_id), &(q.fold + 1).to_string(), "-", &q.precision, q.ap);
        }
        for f in &self.folds {
            row(&mut out, "fold", &(f.fold + 1).to_string(), &f.c.to_string(), &f.precision, f.map);
        }
        row(&mut out, "ALL", "-", "-", &self.precision, self.map);
        row(&mut out, "FOLD_MEAN", "-", "-", &self.fold_precision, self.fold_map);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_examples() {
        assert_eq!(precision_at_k(&[true, false, true, true, false, true], 5).unwrap(), 0.6);
        let all = [true; 7];
        for k in 1..=7 {
            assert_eq!(precision_at_k(&all, k).unwrap(), 1.0);
        }
        assert_eq!(precision_at_k(&[true, false, true], 5).unwrap(), 0.4);
        assert!(precision_at_k(&[true], 0).is_err());
    }

    #[test]
    fn ap_examples() {
        let ap = average_precision(&[true, false, true, false]).unwrap();
        assert!((ap - (1.0 + 2.0 / 3.0) / 2.0).abs() < 1e-12);
        assert_eq!(average_precision(&[true, true, false]).unwrap(), 1.0);
        for n in 1..8 {
            for p in 0..n {
                let mut l = vec![false; n];
                l[p] = true;
                assert_eq!(average_precision(&l).unwrap(), 1.0 / (p + 1) as f64);
            }
        }
        assert!(average_precision(&[false, false]).is_err());
    }

    #[test]
    fn report_aggregates() {
        let q = |id: &str, fold: usize, ap: f64| QueryEval {
            query_id: id.into(),
            fold,
            ap,
            precision: [ap; 4],
        };
        let r = EvalReport::from_queries(vec![q("a", 0, 1.0), q("b", 0, 0.5), q("c", 1, 0.25)], &[1.0, 0.1]);
        assert!((r.map - 1.75 / 3.0).abs() < 1e-12);
        assert!((r.fold_map - (0.75 + 0.25) / 2.0).abs() < 1e-12);
        assert_eq!(r.folds[0].num_queries, 2);
        let tsv = r.to_tsv();
        assert_eq!(tsv.lines().count(), 1 + 3 + 2 + 2);
        assert!(tsv.lines().any(|l| l.starts_with("ALL\t")));
    }
}
