use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::text::{Bm25Params, Query, StreamKind, TextIndex};

/// Authors ordered by summed title and abstract BM25, best first, ties by id.
pub fn bm25_author_ranking(corpus: &Corpus, text: &TextIndex, query: &Query, params: Bm25Params) -> Vec<(usize, f64)> {
    let mut scored: Vec<(usize, f64)> = (0..corpus.num_authors())
        .map(|a| {
            let s: f64 = StreamKind::ALL
                .iter()
                .map(|&st| text.author_bm25::<f64>(corpus, query, a, st, params))
                .sum();
            (a, s)
        })
        .collect();
    // authors are stored in id order, so a stable sort settles ties by id
    scored.sort_by(|a, b| b.1.total_cmp(&a.1));
    scored
}

fn query_seed(seed: u64, query_id: &str) -> u64 {
    // FNV-1a, so the stream for a query does not depend on processing order
    let mut h: u64 = 0xcbf29ce484222325;
    for b in query_id.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100000001b3);
    }
    seed ^ h
}

/// Non-relevant authors for a query with `n` relevant ones: the `n / 2`
/// best by BM25 plus `n - n / 2` drawn uniformly from the rest.
///
/// Returned in that order: BM25 picks by rank, then random picks in draw
/// order.
pub fn sample_negatives(
    corpus: &Corpus,
    text: &TextIndex,
    query: &Query,
    relevant: &BTreeSet<String>,
    seed: u64,
    params: Bm25Params,
) -> Result<Vec<String>> {
    let n = relevant.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "negative sampling for query {} needs at least 2 relevant authors, got {n}",
            query.id
        )));
    }
    let ranking = bm25_author_ranking(corpus, text, query, params);
    let candidates: Vec<usize> = ranking
        .into_iter()
        .map(|(a, _)| a)
        .filter(|&a| !relevant.contains(&corpus.author(a).id))
        .collect();
    if candidates.len() < n {
        return Err(Error::Validation(format!(
            "query {} needs {n} non-relevant authors but the corpus has only {}",
            query.id,
            candidates.len()
        )));
    }
    let top = n / 2;
    let mut picked: Vec<usize> = candidates[..top].to_vec();
    let mut rest: Vec<usize> = candidates[top..].to_vec();
    rest.sort_unstable();
    let mut rng = ChaCha8Rng::seed_from_u64(query_seed(seed, &query.id));
    let draws = rand::seq::index::sample(&mut rng, rest.len(), n - top);
    picked.extend(draws.iter().map(|i| rest[i]));
    Ok(picked.into_iter().map(|a| corpus.author(a).id.clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_publications;

    fn corpus() -> Corpus {
        let mut lines = Vec::new();
        for i in 0..30 {
            // author a{i} has i mentions of "boosting" among filler
            let title = format!("{} filler words here", vec!["boosting"; i % 7].join(" "));
            lines.push(format!("p{i:02}\t2000\tC\tV\ta{i:02}\t\t{title}\t"));
        }
        Corpus::build(parse_publications(&lines.join("\n")).unwrap(), Vec::new()).unwrap()
    }

    fn relevant(ids: &[&str]) -> BTreeSet<String> {
        ids.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn cardinality_and_disjointness() {
        let c = corpus();
        let t = TextIndex::build(&c);
        let q = Query::new("b", "boosting").unwrap();
        let rel = relevant(&["a06", "a13", "a20", "a27"]);
        let neg = sample_negatives(&c, &t, &q, &rel, 7, Bm25Params::default()).unwrap();
        assert_eq!(neg.len(), 4);
        let set: BTreeSet<String> = neg.iter().cloned().collect();
        assert_eq!(set.len(), 4);
        assert!(set.is_disjoint(&rel));
    }

    #[test]
    fn deterministic_for_a_seed() {
        let c = corpus();
        let t = TextIndex::build(&c);
        let q = Query::new("b", "boosting").unwrap();
        let rel = relevant(&["a01", "a02", "a03", "a04", "a05"]);
        let a = sample_negatives(&c, &t, &q, &rel, 42, Bm25Params::default()).unwrap();
        let b = sample_negatives(&c, &t, &q, &rel, 42, Bm25Params::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
    }

    #[test]
    fn bm25_half_is_top_of_full_sort() {
        let c = corpus();
        let t = TextIndex::build(&c);
        let q = Query::new("b", "boosting").unwrap();
        let rel = relevant(&["a06", "a13", "a00", "a01", "a02", "a03"]);
        let neg = sample_negatives(&c, &t, &q, &rel, 1, Bm25Params::default()).unwrap();
        // oracle: score every author directly and sort
        let mut all: Vec<(String, f64)> = c
            .authors()
            .iter()
            .enumerate()
            .filter(|(_, a)| !rel.contains(&a.id))
            .map(|(i, a)| {
                let s: f64 = c
                    .publications_of(i)
                    .iter()
                    .map(|&p| {
                        crate::text::bm25::<f64>(&q, t.doc(StreamKind::Title, p), t.stats(StreamKind::Title), Bm25Params::default())
                            + crate::text::bm25::<f64>(&q, t.doc(StreamKind::Abstract, p), t.stats(StreamKind::Abstract), Bm25Params::default())
                    })
                    .sum();
                (a.id.clone(), s)
            })
            .collect();
        all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
        let expected: Vec<String> = all.iter().take(3).map(|x| x.0.clone()).collect();
        assert_eq!(&neg[..3], expected.as_slice());
    }

    #[test]
    fn errors() {
        let c = corpus();
        let t = TextIndex::build(&c);
        let q = Query::new("b", "boosting").unwrap();
        assert!(sample_negatives(&c, &t, &q, &relevant(&["a01"]), 1, Bm25Params::default()).is_err());
        let many: Vec<String> = (0..20).map(|i| format!("a{i:02}")).collect();
        let rel: BTreeSet<String> = many.into_iter().collect();
        assert!(matches!(
            sample_negatives(&c, &t, &q, &rel, 1, Bm25Params::default()),
            Err(Error::Validation(_))
        ));
    }
}
