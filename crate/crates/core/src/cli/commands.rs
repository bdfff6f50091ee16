use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{info, warn};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::features::{
    normalize_pool, read_vectors, sample_negatives, write_feature_table, write_vectors, FeatureExtractor, QueryPool,
};
use crate::l2r::{cross_validate, select_c, train, RankingModel};
use crate::metrics::{author_citation_stats, author_indices, write_pagerank_tsv, InstitutionTable};
use crate::synth::{generate, SynthConfig};
use crate::text::Query;

use super::config::RunConfig;
use super::Command;

/// One line of a judgments file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JudgmentRow {
    pub query_id: String,
    pub query_text: String,
    pub author_id: String,
    pub relevant: bool,
}

/// TAB-separated `query_id, query text, author_id, relevance` with
/// relevance 0 or 1. Blank lines are skipped.
pub fn parse_judgments(text: &str, source: &str) -> Result<Vec<JudgmentRow>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            continue;
        }
        let err = |m: String| Error::parse(source, i + 1, m);
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 4 {
            return Err(err(format!("expected 4 tab-separated fields, found {}", f.len())));
        }
        let (qid, qtext, aid) = (f[0].trim(), f[1].trim(), f[2].trim());
        if qid.is_empty() || aid.is_empty() {
            return Err(err("empty query or author id".into()));
        }
        if qtext.is_empty() {
            return Err(err(format!("query {qid} has empty text")));
        }
        let relevant = match f[3].trim() {
            "1" => true,
            "0" => false,
            other => return Err(err(format!("relevance must be 0 or 1, got {other:?}"))),
        };
        rows.push(JudgmentRow {
            query_id: qid.to_owned(),
            query_text: qtext.to_owned(),
            author_id: aid.to_owned(),
            relevant,
        });
    }
    Ok(rows)
}

pub fn read_judgments(path: &Path) -> Result<Vec<JudgmentRow>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_judgments(&text, &path.display().to_string())
}

pub(super) fn dispatch<W: Write>(cmd: &Command, cfg: &RunConfig, out: &mut W) -> Result<()> {
    match cmd {
        Command::Ingest {
            publications,
            authors,
            snapshot,
        } => ingest(publications, authors.as_deref(), snapshot, cfg, out),
        Command::Features {
            snapshot,
            judgments,
            out: path,
        } => features(snapshot, judgments, path, cfg, out),
        Command::Train { features, model, c } => train_cmd(features, model, *c, cfg, out),
        Command::Evaluate { features, report } => evaluate(features, report.as_deref(), cfg, out),
        Command::Rank {
            snapshot,
            model,
            query,
            k,
        } => rank(snapshot, model, query, *k, cfg, out),
        Command::Metrics {
            snapshot,
            author,
            query,
            pagerank_out,
        } => metrics(snapshot, author, query.as_deref(), pagerank_out.as_deref(), cfg, out),
        Command::Generate {
            out: dir,
            authors,
            publications,
        } => generate_cmd(dir, *authors, *publications, cfg, out),
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |e| Error::io(path, e)
}

fn stdout_err(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

fn ingest<W: Write>(pubs: &Path, authors: Option<&Path>, snapshot: &Path, cfg: &RunConfig, out: &mut W) -> Result<()> {
    let corpus = Corpus::load(pubs, authors)?;
    let stats = corpus.stats(cfg.current_year)?;
    if corpus.dropped_citations() > 0 {
        warn!("dropped {} citations to unknown or self publications", corpus.dropped_citations());
    }
    corpus.save_snapshot(snapshot)?;
    writeln!(out, "{stats}").map_err(stdout_err)
}

/// Judgments of one query in file order.
struct QueryJudgments {
    id: String,
    text: String,
    relevant: Vec<String>,
    nonrelevant: Vec<String>,
}

fn group_judgments(rows: Vec<JudgmentRow>) -> Result<Vec<QueryJudgments>> {
    let mut order: Vec<QueryJudgments> = Vec::new();
    let mut pos: HashMap<String, usize> = HashMap::new();
    let mut seen: HashMap<(String, String), bool> = HashMap::new();
    for r in rows {
        let i = *pos.entry(r.query_id.clone()).or_insert_with(|| {
            order.push(QueryJudgments {
                id: r.query_id.clone(),
                text: r.query_text.clone(),
                relevant: Vec::new(),
                nonrelevant: Vec::new(),
            });
            order.len() - 1
        });
        let q = &mut order[i];
        if q.text != r.query_text {
            return Err(Error::Validation(format!("query {} has two different texts", r.query_id)));
        }
        match seen.insert((r.query_id.clone(), r.author_id.clone()), r.relevant) {
            Some(prev) if prev != r.relevant => {
                return Err(Error::Validation(format!(
                    "author {} judged both relevant and non-relevant for query {}",
                    r.author_id, r.query_id
                )))
            }
            Some(_) => continue,
            None => {}
        }
        if r.relevant {
            q.relevant.push(r.author_id);
        } else {
            q.nonrelevant.push(r.author_id);
        }
    }
    Ok(order)
}

fn features<W: Write>(snapshot: &Path, judgments: &Path, path: &Path, cfg: &RunConfig, out: &mut W) -> Result<()> {
    let corpus = Corpus::load_snapshot(snapshot)?;
    let queries = group_judgments(read_judgments(judgments)?)?;
    let fcfg = cfg.feature_config(&corpus);
    let fx = FeatureExtractor::<f64>::new(&corpus, fcfg)?;
    let mut pools = Vec::new();
    for q in &queries {
        for a in q.relevant.iter().chain(&q.nonrelevant) {
            corpus.require_author(a)?;
        }
        if q.relevant.is_empty() {
            warn!("query {}: no relevant authors, skipped", q.id);
            continue;
        }
        let query = Query::new(q.id.clone(), &q.text)?;
        let negatives = if !q.nonrelevant.is_empty() {
            q.nonrelevant.clone()
        } else if q.relevant.len() < 2 {
            warn!("query {}: a single relevant author and no negatives, skipped", q.id);
            continue;
        } else {
            let rel: BTreeSet<String> = q.relevant.iter().cloned().collect();
            sample_negatives(&corpus, fx.text(), &query, &rel, cfg.seed, fcfg.bm25)?
        };
        let ctx = fx.query_context(&query)?;
        let labelled = q.relevant.iter().map(|a| (a, true)).chain(negatives.iter().map(|a| (a, false)));
        let vectors = labelled
            .map(|(a, label)| {
                let mut v = fx.vector(&ctx, corpus.require_author(a)?, cfg.mask);
                v.label = Some(label);
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        info!("query {}: {} relevant, {} non-relevant", q.id, q.relevant.len(), negatives.len());
        pools.push(normalize_pool(&QueryPool {
            query_id: q.id.clone(),
            vectors,
        }));
    }
    if pools.is_empty() {
        return Err(Error::Validation("no query has usable judgments".into()));
    }
    let mut w = create(path)?;
    write_vectors(&pools, &mut w)?;
    w.flush().map_err(io_err(path))?;
    let sidecar = sidecar_path(path);
    let mut s = create(&sidecar)?;
    write_feature_table(&mut s).and_then(|_| s.flush()).map_err(io_err(&sidecar))?;
    let n: usize = pools.iter().map(|p| p.vectors.len()).sum();
    writeln!(out, "queries\t{}\nvectors\t{n}\nmask\t{}", pools.len(), cfg.mask).map_err(stdout_err)
}

/// `<features file>.features.tsv`: the index-to-name table.
pub fn sidecar_path(features: &Path) -> PathBuf {
    let mut s = features.as_os_str().to_owned();
    s.push(".features.tsv");
    PathBuf::from(s)
}

fn train_cmd<W: Write>(features: &Path, model_path: &Path, c: Option<f64>, cfg: &RunConfig, out: &mut W) -> Result<()> {
    let pools = read_vectors::<f64>(features)?;
    let trainer = cfg.trainer_config();
    let c = match c {
        Some(c) if c > 0.0 && c.is_finite() => c,
        Some(c) => return Err(Error::InvalidArgument(format!("C must be positive, got {c}"))),
        None => select_c(&trainer, &pools, &cfg.cv_config())?,
    };
    let model = train(&trainer, &pools, c)?;
    if !model.meta.converged {
        warn!("training stopped at the iteration cap");
    }
    model.save(model_path)?;
    writeln!(
        out,
        "trainer\t{}\nC\t{}\niterations\t{}\nobjective\t{}\nconverged\t{}",
        model.kind, model.c, model.meta.iterations, model.meta.objective, model.meta.converged
    )
    .map_err(stdout_err)
}

fn evaluate<W: Write>(features: &Path, report: Option<&Path>, cfg: &RunConfig, out: &mut W) -> Result<()> {
    let pools = read_vectors::<f64>(features)?;
    let r = cross_validate(&pools, &cfg.trainer_config(), &cfg.cv_config())?;
    let tsv = r.to_tsv();
    match report {
        Some(path) => {
            std::fs::write(path, &tsv).map_err(io_err(path))?;
            writeln!(out, "MAP\t{:.4}", r.map).map_err(stdout_err)
        }
        None => out.write_all(tsv.as_bytes()).map_err(stdout_err),
    }
}

fn rank<W: Write>(snapshot: &Path, model: &Path, text: &str, k: usize, cfg: &RunConfig, out: &mut W) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let corpus = Corpus::load_snapshot(snapshot)?;
    let model = RankingModel::<f64>::load(model)?;
    let fx = FeatureExtractor::<f64>::new(&corpus, cfg.feature_config(&corpus))?;
    let query = Query::new("query", text)?;
    let ctx = fx.query_context(&query)?;
    let pool = normalize_pool(&QueryPool {
        query_id: query.id.clone(),
        vectors: (0..corpus.num_authors()).map(|a| fx.vector(&ctx, a, cfg.mask)).collect(),
    });
    for (author, score) in model.rank(&pool)?.into_iter().take(k) {
        writeln!(out, "{author}\t{score:.6}").map_err(stdout_err)?;
    }
    Ok(())
}

fn metrics<W: Write>(
    snapshot: &Path,
    author_id: &str,
    query: Option<&str>,
    pagerank_out: Option<&Path>,
    cfg: &RunConfig,
    out: &mut W,
) -> Result<()> {
    let corpus = Corpus::load_snapshot(snapshot)?;
    let a = corpus.require_author(author_id)?;
    let fcfg = cfg.feature_config(&corpus);
    let fx = FeatureExtractor::<f64>::new(&corpus, fcfg)?;
    let idx = author_indices::<f64>(&corpus, a, &fcfg.indices);
    let inst = InstitutionTable::<f64>::build(&corpus).for_author(&corpus, a);
    let pr: f64 = corpus.publications_of(a).iter().map(|&p| fx.pagerank().scores[p]).sum();
    let author = corpus.author(a);
    let mut lines = vec![
        ("author", author.id.clone()),
        ("name", author.name.clone()),
        ("institution", author.institution.clone().unwrap_or_default()),
        ("publications", corpus.publications_of(a).len().to_string()),
        ("career_span", crate::metrics::career_span(&corpus, a).to_string()),
        ("collaborators", crate::metrics::collaborator_count(&corpus, a).to_string()),
        ("citations", idx.total_citations.to_string()),
        ("h_index", idx.h.to_string()),
        ("g_index", idx.g.to_string()),
        ("a_index", format!("{:.6}", idx.a)),
        ("e_index", format!("{:.6}", idx.e)),
        ("contemporary_h_index", idx.contemporary.to_string()),
        ("trend_h_index", idx.trend.to_string()),
        ("individual_h_index", format!("{:.6}", idx.individual)),
        ("pagerank_sum", format!("{pr:.9}")),
        ("institution_h_index", inst.h.to_string()),
        ("institution_g_index", inst.g.to_string()),
        ("institution_a_index", format!("{:.6}", inst.a)),
    ];
    if let Some(text) = query {
        let q = Query::new("query", text)?;
        let ctx = fx.query_context(&q)?;
        let matching = corpus.publications_of(a).iter().filter(|&&p| ctx.matches(p)).count();
        let cs = author_citation_stats::<f64>(&corpus, fx.text(), a, &q);
        lines.push(("query_terms", q.terms.join(" ")));
        lines.push(("matching_publications", matching.to_string()));
        lines.push(("citations_matching", cs.total.to_string()));
        lines.push(("hb_index", ctx.hb_index.to_string()));
    }
    for (k, v) in lines {
        writeln!(out, "{k}={v}").map_err(stdout_err)?;
    }
    if let Some(path) = pagerank_out {
        let mut w = create(path)?;
        write_pagerank_tsv(&corpus, fx.pagerank(), &mut w)
            .and_then(|_| w.flush())
            .map_err(io_err(path))?;
    }
    Ok(())
}

fn generate_cmd<W: Write>(dir: &Path, authors: usize, publications: usize, cfg: &RunConfig, out: &mut W) -> Result<()> {
    let synth = generate(&SynthConfig {
        seed: cfg.seed,
        num_authors: authors,
        num_publications: publications,
        ..SynthConfig::default()
    })?;
    synth.write_to(dir)?;
    for t in &synth.topics {
        writeln!(out, "{}\t{}\t{}", t.query_id, t.query_text, t.experts.join(",")).map_err(stdout_err)?;
    }
    Ok(())
}
