#![allow(dead_code)]

use std::path::Path;

use expertrank::features::{FeatureVector, QueryPool};

/// Runs the command line in-process: (exit code, stdout, stderr).
pub fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("expertrank").chain(args.iter().copied());
    let code = expertrank::cli::main_with_args(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

pub fn cli_ok(args: &[&str]) -> String {
    let (code, out, err) = cli(args);
    assert_eq!(code, 0, "expertrank {}: {err}", args.join(" "));
    out
}

pub fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

pub fn pool(id: &str, rows: &[(Vec<f64>, bool)]) -> QueryPool<f64> {
    QueryPool {
        query_id: id.into(),
        vectors: rows
            .iter()
            .enumerate()
            .map(|(i, (v, l))| FeatureVector {
                query_id: id.into(),
                author_id: format!("{id}-a{i:02}"),
                values: v.clone(),
                label: Some(*l),
            })
            .collect(),
    }
}

/// MAP column of the `ALL` row of an evaluation report.
pub fn report_map(report: &str) -> f64 {
    let row = report.lines().find(|l| l.starts_with("ALL\t")).expect("ALL row");
    row.rsplit('\t').next().unwrap().parse().unwrap()
}
