//! The `expertrank` command line: argument definitions, configuration
//! layering and the subcommands.

mod commands;
mod config;

pub use commands::{parse_judgments, read_judgments, JudgmentRow};
pub use config::{parse_c_grid, RunConfig, CONFIG_KEYS};

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Result;

#[derive(Debug, Parser)]
#[command(name = "expertrank", version, about = "Learning-to-rank expert finding over publication corpora")]
pub struct Cli {
    /// Flat `key = value` configuration file; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(flatten)]
    pub overrides: Overrides,

    #[command(subcommand)]
    pub command: Command,
}

/// Flag counterparts of the configuration keys.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    #[arg(long, global = true)]
    pub k1: Option<f64>,
    #[arg(long, global = true)]
    pub b: Option<f64>,
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    #[arg(long, global = true)]
    pub current_year: Option<i32>,
    #[arg(long, global = true)]
    pub damping: Option<f64>,
    #[arg(long, global = true)]
    pub pagerank_tol: Option<f64>,
    #[arg(long, global = true)]
    pub pagerank_max_iter: Option<usize>,
    /// pairwise or listwise
    #[arg(long, global = true)]
    pub trainer: Option<String>,
    /// Comma-separated C values for model selection.
    #[arg(long, global = true)]
    pub c_grid: Option<String>,
    #[arg(long, global = true)]
    pub folds: Option<usize>,
    #[arg(long, global = true)]
    pub inner_folds: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Feature groups to keep: any of text, profile, graph, or all.
    #[arg(long, global = true)]
    pub mask: Option<String>,
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate publication and author files, write a corpus snapshot and print statistics.
    Ingest {
        #[arg(long)]
        publications: PathBuf,
        #[arg(long)]
        authors: Option<PathBuf>,
        #[arg(long)]
        snapshot: PathBuf,
    },
    /// Build labelled query pools with negative sampling and write feature vectors.
    Features {
        #[arg(long)]
        snapshot: PathBuf,
        /// TAB-separated query_id, query text, author_id, relevance.
        #[arg(long)]
        judgments: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a ranking model on a feature file.
    Train {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Fixed C; selected from the grid by cross-validation when absent.
        #[arg(long)]
        c: Option<f64>,
    },
    /// Cross-validate over queries and write the evaluation report.
    Evaluate {
        #[arg(long)]
        features: PathBuf,
        /// Report path; standard output when absent.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Rank every author of the corpus for a free-text query.
    Rank {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        query: String,
        #[arg(short, long, default_value_t = 10)]
        k: usize,
    },
    /// Print bibliometric indices of one author.
    Metrics {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        author: String,
        /// Adds query-dependent values (matching papers, h-b index).
        #[arg(long)]
        query: Option<String>,
        /// Also write per-publication PageRank scores here.
        #[arg(long)]
        pagerank_out: Option<PathBuf>,
    },
    /// Write a seeded synthetic corpus with planted experts and judgments.
    Generate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 240)]
        authors: usize,
        #[arg(long, default_value_t = 2200)]
        publications: usize,
    },
}

impl Cli {
    /// Defaults, then the configuration file, then flags.
    pub fn run_config(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let o = &self.overrides;
        let pairs: [(&str, Option<String>); 16] = [
            ("bm25.k1", o.k1.map(|v| v.to_string())),
            ("bm25.b", o.b.map(|v| v.to_string())),
            ("index.gamma", o.gamma.map(|v| v.to_string())),
            ("index.delta", o.delta.map(|v| v.to_string())),
            ("current_year", o.current_year.map(|v| v.to_string())),
            ("pagerank.damping", o.damping.map(|v| v.to_string())),
            ("pagerank.tol", o.pagerank_tol.map(|v| v.to_string())),
            ("pagerank.max_iter", o.pagerank_max_iter.map(|v| v.to_string())),
            ("trainer", o.trainer.clone()),
            ("c_grid", o.c_grid.clone()),
            ("folds", o.folds.map(|v| v.to_string())),
            ("inner_folds", o.inner_folds.map(|v| v.to_string())),
            ("seed", o.seed.map(|v| v.to_string())),
            ("mask", o.mask.clone()),
            ("listwise.epsilon", o.epsilon.map(|v| v.to_string())),
            ("listwise.max_iter", o.max_iter.map(|v| v.to_string())),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                cfg.set(k, &v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Runs a parsed command line, writing normal output to `out`.
pub fn run<W: Write>(cli: &Cli, out: &mut W) -> Result<()> {
    let cfg = cli.run_config()?;
    commands::dispatch(&cli.command, &cfg, out)
}

/// Parses `args`, runs, and returns the process exit code: 0 success,
/// 1 usage, 2 invalid input, 3 runtime failure.
pub fn main_with_args<I, T, W, E>(args: I, out: &mut W, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match run(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
