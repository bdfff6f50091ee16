mod common;

use std::path::Path;
use std::process::Command;

use common::{cli, cli_ok, path};
use expertrank::features::{feature_index, read_vectors, FeatureGroup, FEATURES};
use expertrank::l2r::{ModelKind, RankingModel};

const PUBS: &str = "\
p1\t2001\tC\tICML\ta1;a2\t\tNeural networks for control\tneural nets
p2\t2003\tJ\tJMLR\ta1\tp1\tDeep neural networks\tnetworks of neurons
p3\t2004\tC\tKDD\ta3\tp1;p2\tGraph mining\t
p4\t2006\tC\tKDD\ta3;a4\tp3\tFrequent subgraph mining\tgraph patterns
p5\t2008\tJ\tTKDE\ta4\tp3;p4;p9\tCommunity detection\tgraph clustering
";

const AUTHORS: &str = "a1\tAda\tinst1\na2\tBob\tinst1\na3\tCy\tinst2\na4\tDee\t\n";

fn tiny(dir: &Path) -> String {
    std::fs::write(dir.join("pubs.tsv"), PUBS).unwrap();
    std::fs::write(dir.join("authors.tsv"), AUTHORS).unwrap();
    let snap = dir.join("c.snap");
    cli_ok(&[
        "ingest",
        "--publications",
        path(&dir.join("pubs.tsv")),
        "--authors",
        path(&dir.join("authors.tsv")),
        "--snapshot",
        path(&snap),
    ]);
    path(&snap).to_string()
}

fn synthetic(dir: &Path) -> String {
    let data = dir.join("data");
    cli_ok(&["generate", "--out", path(&data), "--seed", "3"]);
    let snap = dir.join("c.snap");
    cli_ok(&[
        "ingest",
        "--publications",
        path(&data.join("publications.tsv")),
        "--authors",
        path(&data.join("authors.tsv")),
        "--snapshot",
        path(&snap),
    ]);
    path(&snap).to_string()
}

#[test]
fn ingest_reports_counts() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("pubs.tsv"), PUBS).unwrap();
    let out = cli_ok(&[
        "ingest",
        "--publications",
        path(&dir.path().join("pubs.tsv")),
        "--snapshot",
        path(&dir.path().join("c.snap")),
    ]);
    assert!(out.contains("total_publications\t5"), "{out}");
    assert!(out.contains("total_authors\t4"));
    assert!(out.contains("dropped_citations\t1"));
    assert!(dir.path().join("c.snap").exists());
}

#[test]
fn ingest_errors() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.tsv");
    let snap = dir.path().join("c.snap");
    let (code, _, err) = cli(&["ingest", "--publications", path(&missing), "--snapshot", path(&snap)]);
    assert_ne!(code, 0);
    assert!(err.contains("nope.tsv"), "{err}");

    let dup = dir.path().join("dup.tsv");
    std::fs::write(&dup, format!("{PUBS}p3\t2009\tC\tV\ta1\t\tagain\t\n")).unwrap();
    let (code, _, err) = cli(&["ingest", "--publications", path(&dup), "--snapshot", path(&snap)]);
    assert_eq!(code, 2);
    assert!(err.contains("p3"), "{err}");

    let bad = dir.path().join("bad.tsv");
    std::fs::write(&bad, "p1\t2001\tX\tV\ta1\t\tt\t\n").unwrap();
    let (code, _, err) = cli(&["ingest", "--publications", path(&bad), "--snapshot", path(&snap)]);
    assert_eq!(code, 2);
    assert!(err.contains(":1:"), "{err}");
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(cli(&[]).0, 1);
    assert_eq!(cli(&["frobnicate"]).0, 1);
    assert_eq!(cli(&["ingest"]).0, 1);
    assert_eq!(cli(&["rank", "--snapshot", "x", "--model", "m", "--query", "q", "-k", "many"]).0, 1);
    let (code, out, _) = cli(&["--help"]);
    assert_eq!(code, 0);
    for sub in ["ingest", "features", "train", "evaluate", "rank", "metrics"] {
        assert!(out.contains(sub), "{sub} missing from help");
    }
    let (code, _, err) = cli(&["evaluate", "--features", "f", "--trainer", "ranknet"]);
    assert_eq!(code, 1, "{err}");
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_expertrank");
    assert_eq!(Command::new(bin).output().unwrap().status.code(), Some(1));
    assert_eq!(Command::new(bin).arg("--version").output().unwrap().status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(bin)
        .args(["metrics", "--snapshot", path(&dir.path().join("none.snap")), "--author", "a1"])
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(3));
}

#[test]
fn metrics_report() {
    let dir = tempfile::tempdir().unwrap();
    let snap = tiny(dir.path());
    let pr = dir.path().join("pr.tsv");
    let out = cli_ok(&["metrics", "--snapshot", &snap, "--author", "a3", "--query", "graph mining", "--pagerank-out", path(&pr)]);
    let kv: std::collections::HashMap<&str, &str> = out.lines().filter_map(|l| l.split_once('=')).collect();
    assert_eq!(kv["h_index"], "1");
    assert_eq!(kv["g_index"], "1");
    assert_eq!(kv["citations"], "3");
    assert_eq!(kv["matching_publications"], "2");
    assert_eq!(kv["institution"], "inst2");
    let lines = std::fs::read_to_string(&pr).unwrap();
    assert_eq!(lines.lines().count(), 5);
    let total: f64 = lines.lines().map(|l| l.split('\t').nth(1).unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-6);
    assert_eq!(cli(&["metrics", "--snapshot", &snap, "--author", "zz"]).0, 2);
}

#[test]
fn masked_features_keep_width() {
    let dir = tempfile::tempdir().unwrap();
    let snap = synthetic(dir.path());
    let judgments = dir.path().join("data/judgments.tsv");
    let out = dir.path().join("f.txt");
    cli_ok(&["features", "--snapshot", &snap, "--judgments", path(&judgments), "--out", path(&out), "--mask", "text"]);
    let pools = read_vectors::<f64>(&out).unwrap();
    assert_eq!(pools.len(), 8);
    for v in pools.iter().flat_map(|p| &p.vectors) {
        assert_eq!(v.values.len(), FEATURES.len());
        for (x, (_, g)) in v.values.iter().zip(FEATURES.iter()) {
            if *g != FeatureGroup::Text {
                assert_eq!(*x, 0.0);
            }
            assert!((0.0..=1.0).contains(x));
        }
    }
    let table = std::fs::read_to_string(dir.path().join("f.txt.features.tsv")).unwrap();
    assert_eq!(table.lines().count(), FEATURES.len() + 1);
}

#[test]
fn planted_experts_lead_bm25() {
    let dir = tempfile::tempdir().unwrap();
    let snap = synthetic(dir.path());
    let out = dir.path().join("f.txt");
    cli_ok(&["features", "--snapshot", &snap, "--judgments", path(&dir.path().join("data/judgments.tsv")), "--out", path(&out)]);
    let (t, a) = (feature_index("bm25_title").unwrap(), feature_index("bm25_abstract").unwrap());
    for p in read_vectors::<f64>(&out).unwrap() {
        let sum = |v: &expertrank::Vector| v.values[t] + v.values[a];
        let worst_expert = p.vectors.iter().filter(|v| v.is_relevant()).map(sum).fold(f64::INFINITY, f64::min);
        let best_other = p.vectors.iter().filter(|v| !v.is_relevant()).map(sum).fold(f64::NEG_INFINITY, f64::max);
        assert!(worst_expert > best_other, "query {}", p.query_id);
    }
}

#[test]
fn rank_contract() {
    let dir = tempfile::tempdir().unwrap();
    let snap = synthetic(dir.path());
    let feats = dir.path().join("f.txt");
    cli_ok(&["features", "--snapshot", &snap, "--judgments", path(&dir.path().join("data/judgments.tsv")), "--out", path(&feats)]);
    let model = dir.path().join("m.txt");
    let summary = cli_ok(&["train", "--features", path(&feats), "--model", path(&model), "--c", "1"]);
    assert!(summary.contains("converged\ttrue"), "{summary}");

    let out = cli_ok(&["rank", "--snapshot", &snap, "--model", path(&model), "--query", "graph mining", "-k", "5"]);
    let rows: Vec<(String, f64)> = out
        .lines()
        .map(|l| {
            let (a, s) = l.split_once('\t').unwrap();
            (a.to_string(), s.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.windows(2).all(|w| w[0].1 >= w[1].1));

    // the planted experts of that topic come first
    let judgments = std::fs::read_to_string(dir.path().join("data/judgments.tsv")).unwrap();
    let experts: Vec<&str> = judgments.lines().filter(|l| l.contains("graph mining")).map(|l| l.split('\t').nth(2).unwrap()).collect();
    assert!(rows.iter().all(|(a, _)| experts.contains(&a.as_str())), "{rows:?} vs {experts:?}");

    let zero = dir.path().join("zero.txt");
    RankingModel::<f64>::zeros(ModelKind::Pairwise, FEATURES.len()).save(&zero).unwrap();
    let out = cli_ok(&["rank", "--snapshot", &snap, "--model", path(&zero), "--query", "graph mining", "-k", "3"]);
    let ids: Vec<&str> = out.lines().map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(ids, ["a0001", "a0002", "a0003"]);

    let short = dir.path().join("short.txt");
    RankingModel::<f64>::zeros(ModelKind::Pairwise, 3).save(&short).unwrap();
    let (code, _, err) = cli(&["rank", "--snapshot", &snap, "--model", path(&short), "--query", "graph mining"]);
    assert_eq!(code, 2, "{err}");
    let (code, _, _) = cli(&["evaluate", "--features", path(&feats), "--c-grid", "0"]);
    assert_eq!(code, 1);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let snap = synthetic(dir.path());
    let judgments = dir.path().join("data/judgments.tsv");
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# ablation\nmask = graph\nseed = 11\n").unwrap();
    let (f1, f2) = (dir.path().join("f1.txt"), dir.path().join("f2.txt"));
    let out = cli_ok(&["features", "--config", path(&cfg), "--snapshot", &snap, "--judgments", path(&judgments), "--out", path(&f1)]);
    assert!(out.contains("mask\tgraph"), "{out}");
    let out = cli_ok(&[
        "features",
        "--config",
        path(&cfg),
        "--mask",
        "text,profile",
        "--snapshot",
        &snap,
        "--judgments",
        path(&judgments),
        "--out",
        path(&f2),
    ]);
    assert!(out.contains("mask\ttext,profile"), "{out}");

    std::fs::write(&cfg, "mask = graph\nbogus = 1\n").unwrap();
    let (code, _, err) = cli(&["features", "--config", path(&cfg), "--snapshot", &snap, "--judgments", path(&judgments), "--out", path(&f1)]);
    assert_eq!(code, 2);
    assert!(err.contains("run.cfg:2"), "{err}");
}

#[test]
fn features_validation() {
    let dir = tempfile::tempdir().unwrap();
    let snap = tiny(dir.path());
    let j = dir.path().join("j.tsv");
    let out = dir.path().join("f.txt");
    // explicit negatives are used as given; a query without positives is skipped
    std::fs::write(&j, "q1\tneural networks\ta1\t1\nq1\tneural networks\ta3\t0\nq2\tgraph\ta4\t0\n").unwrap();
    let summary = cli_ok(&["features", "--snapshot", &snap, "--judgments", path(&j), "--out", path(&out)]);
    assert!(summary.contains("queries\t1") && summary.contains("vectors\t2"), "{summary}");

    std::fs::write(&j, "q1\tneural networks\tnobody\t1\n").unwrap();
    assert_eq!(cli(&["features", "--snapshot", &snap, "--judgments", path(&j), "--out", path(&out)]).0, 2);
    std::fs::write(&j, "q1\tneural networks\ta1\t0\n").unwrap();
    assert_eq!(cli(&["features", "--snapshot", &snap, "--judgments", path(&j), "--out", path(&out)]).0, 2);
}

#[test]
fn train_evaluate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let snap = synthetic(dir.path());
    let feats = dir.path().join("f.txt");
    cli_ok(&["features", "--snapshot", &snap, "--judgments", path(&dir.path().join("data/judgments.tsv")), "--out", path(&feats)]);
    let model = dir.path().join("m.txt");
    cli_ok(&["train", "--features", path(&feats), "--model", path(&model), "--trainer", "listwise"]);
    let m = RankingModel::<f64>::load(&model).unwrap();
    assert_eq!(m.kind, ModelKind::Listwise);
    assert_eq!(m.dim(), FEATURES.len());
    assert!([0.01, 0.1, 1.0, 10.0].contains(&m.c));

    let report = cli_ok(&["evaluate", "--features", path(&feats), "--folds", "8"]);
    let header = report.lines().next().unwrap();
    assert_eq!(header, "row\tfold\tC\tP@5\tP@10\tP@15\tP@20\tMAP");
    assert_eq!(report.lines().filter(|l| l.starts_with("query:")).count(), 8);
    assert_eq!(report.lines().filter(|l| l.starts_with("fold\t")).count(), 8);
    assert!(common::report_map(&report) >= 0.9);
    assert_eq!(cli(&["evaluate", "--features", path(&feats), "--folds", "9"]).0, 2);
}
