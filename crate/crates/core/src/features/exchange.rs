//! `<label> qid:<query> 1:<v1> ... K:<vK> # <author>` lines.

use std::io::Write;

use crate::error::{Error, Result};
use crate::scalar::{format_decimal, Scalar};

use super::{FeatureVector, QueryPool, FEATURES};

pub const FEATURE_TABLE_VERSION: &str = "expertrank-features-v1";

pub fn write_vectors<T: Scalar, W: Write>(pools: &[QueryPool<T>], mut w: W) -> Result<()> {
    let io = |e| Error::io("<exchange output>", e);
    for pool in pools {
        for v in &pool.vectors {
            let label = match v.label {
                Some(true) => 1,
                Some(false) => 0,
                None => {
                    return Err(Error::InvalidArgument(format!(
                        "vector ({}, {}) has no label",
                        v.query_id, v.author_id
                    )))
                }
            };
            if v.query_id.contains(char::is_whitespace) || v.author_id.contains(char::is_whitespace) {
                return Err(Error::InvalidArgument(format!(
                    "ids must not contain whitespace: ({}, {})",
                    v.query_id, v.author_id
                )));
            }
            let mut line = format!("{label} qid:{}", v.query_id);
            for (i, x) in v.values.iter().enumerate() {
                line.push_str(&format!(" {}:{}", i + 1, format_decimal(*x)));
            }
            line.push_str(" # ");
            line.push_str(&v.author_id);
            writeln!(w, "{line}").map_err(io)?;
        }
    }
    Ok(())
}

/// Parses exchange text; pools appear in order of their first line.
pub fn parse_vectors<T: Scalar>(text: &str, source: &str) -> Result<Vec<QueryPool<T>>> {
    let mut pools: Vec<QueryPool<T>> = Vec::new();
    let mut dim: Option<usize> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |m: String| Error::parse(source, line_no, m);
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        let (body, author) = raw
            .split_once('#')
            .ok_or_else(|| err("missing '# <author_id>' comment".into()))?;
        let author = author.trim();
        if author.is_empty() {
            return Err(err("empty author id".into()));
        }
        let mut tokens = body.split_whitespace();
        let label = match tokens.next() {
            Some("1") => true,
            Some("0") => false,
            other => return Err(err(format!("label must be 0 or 1, got {other:?}"))),
        };
        let qid = tokens
            .next()
            .and_then(|t| t.strip_prefix("qid:"))
            .filter(|q| !q.is_empty())
            .ok_or_else(|| err("missing qid:<query_id>".into()))?;
        let mut values = Vec::new();
        for (k, tok) in tokens.enumerate() {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| err(format!("malformed feature {tok:?}")))?;
            let idx: usize = idx.parse().map_err(|_| err(format!("bad feature index {idx:?}")))?;
            if idx != k + 1 {
                return Err(err(format!("feature index {idx} where {} expected", k + 1)));
            }
            let val: T = val.parse().map_err(|_| err(format!("bad feature value {val:?}")))?;
            if !val.is_finite() {
                return Err(err(format!("non-finite feature value {val}")));
            }
            values.push(val);
        }
        match dim {
            None => dim = Some(values.len()),
            Some(d) if d != values.len() => {
                return Err(err(format!("{} features where {d} expected", values.len())));
            }
            _ => {}
        }
        let vector = FeatureVector {
            query_id: qid.to_owned(),
            author_id: author.to_owned(),
            values,
            label: Some(label),
        };
        match pools.iter_mut().find(|p| p.query_id == qid) {
            Some(p) => p.vectors.push(vector),
            None => pools.push(QueryPool {
                query_id: qid.to_owned(),
                vectors: vec![vector],
            }),
        }
    }
    Ok(pools)
}

pub fn read_vectors<T: Scalar>(path: &std::path::Path) -> Result<Vec<QueryPool<T>>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_vectors(&text, &path.display().to_string())
}

/// Machine-readable feature ordering: `index<TAB>name<TAB>group`.
pub fn write_feature_table<W: Write>(mut w: W) -> std::io::Result<()> {
    writeln!(w, "# {FEATURE_TABLE_VERSION}")?;
    for (i, (name, group)) in FEATURES.iter().enumerate() {
        writeln!(w, "{}\t{}\t{}", i + 1, name, group.name())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_hand_written_lines() {
        let text = "1 qid:7 1:0.5 2:3 # alice\n0 qid:7 1:0 2:-1.25 # bob\n";
        let pools: Vec<QueryPool<f64>> = parse_vectors(text, "t").unwrap();
        assert_eq!(pools.len(), 1);
        let p = &pools[0];
        assert_eq!(p.query_id, "7");
        assert_eq!(p.vectors[0].values, [0.5, 3.0]);
        assert_eq!(p.vectors[0].author_id, "alice");
        assert!(p.vectors[0].is_relevant());
        assert_eq!(p.vectors[1].values, [0.0, -1.25]);
        assert_eq!(p.vectors[1].label, Some(false));
    }

    #[test]
    fn rejects_malformed_lines() {
        let cases = [
            "1 qid:7 1:0.5 3:3 # a",
            "1 qid:7 2:0.5 # a",
            "2 qid:7 1:0.5 # a",
            "1 7 1:0.5 # a",
            "1 qid:7 1:x # a",
            "1 qid:7 1:0.5",
            "1 qid:7 1:NaN # a",
        ];
        for c in cases {
            let text = format!("1 qid:1 1:1 # ok\n{c}\n");
            match parse_vectors::<f64>(&text, "t") {
                Err(Error::Parse { line, .. }) => assert_eq!(line, 2, "{c}"),
                other => panic!("{c}: {other:?}"),
            }
        }
        assert!(parse_vectors::<f64>("1 qid:1 1:1 # a\n0 qid:1 1:1 2:2 # b", "t").is_err());
    }

    #[test]
    fn writer_requires_labels() {
        let pool = QueryPool {
            query_id: "q".into(),
            vectors: vec![FeatureVector {
                query_id: "q".into(),
                author_id: "a".into(),
                values: vec![1.0f64],
                label: None,
            }],
        };
        assert!(write_vectors(&[pool], Vec::new()).is_err());
    }

    #[test]
    fn feature_table_lists_every_slot() {
        let mut out = Vec::new();
        write_feature_table(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), FEATURES.len() + 1);
        assert!(text.contains("1\tbm25_title\ttext"));
    }

    proptest! {
        #[test]
        fn write_read_round_trip(
            pools in prop::collection::vec(
                prop::collection::vec((prop::collection::vec(-1e6f64..1e6, 3), any::<bool>()), 1..5),
                1..4,
            )
        ) {
            let pools: Vec<QueryPool<f64>> = pools
                .into_iter()
                .enumerate()
                .map(|(q, rows)| QueryPool {
                    query_id: format!("q{q}"),
                    vectors: rows
                        .into_iter()
                        .enumerate()
                        .map(|(i, (values, l))| FeatureVector {
                            query_id: format!("q{q}"),
                            author_id: format!("author-{i}"),
                            values,
                            label: Some(l),
                        })
                        .collect(),
                })
                .collect();
            let mut buf = Vec::new();
            write_vectors(&pools, &mut buf).unwrap();
            let text = String::from_utf8(buf).unwrap();
            let back: Vec<QueryPool<f64>> = parse_vectors(&text, "t").unwrap();
            prop_assert_eq!(back, pools);
        }
    }
}
