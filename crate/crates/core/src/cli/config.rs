use std::path::Path;

use crate::error::{Error, Result};
use crate::features::{FeatureConfig, FeatureMask};
use crate::l2r::{CvConfig, ListwiseConfig, ModelKind, TrainerConfig};
use crate::metrics::{IndexParams, PageRankParams};
use crate::text::Bm25Params;

/// Every tunable of a run. Built from defaults, then an optional flat
/// `key = value` file, then command-line flags.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub bm25: Bm25Params,
    pub gamma: f64,
    pub delta: f64,
    /// Reference year for age weighting; the newest publication if unset.
    pub current_year: Option<i32>,
    pub pagerank: PageRankParams,
    pub trainer: ModelKind,
    pub c_grid: Vec<f64>,
    pub folds: usize,
    pub inner_folds: usize,
    pub seed: u64,
    pub mask: FeatureMask,
    pub listwise_epsilon: f64,
    pub listwise_max_iter: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let cv = CvConfig::default();
        let lw = ListwiseConfig::default();
        RunConfig {
            bm25: Bm25Params::default(),
            gamma: 4.0,
            delta: 1.0,
            current_year: None,
            pagerank: PageRankParams::default(),
            trainer: ModelKind::Pairwise,
            c_grid: cv.c_grid,
            folds: cv.folds,
            inner_folds: cv.inner_folds,
            seed: cv.seed,
            mask: FeatureMask::ALL,
            listwise_epsilon: lw.epsilon,
            listwise_max_iter: lw.max_iter,
        }
    }
}

pub const CONFIG_KEYS: [&str; 16] = [
    "bm25.k1",
    "bm25.b",
    "index.gamma",
    "index.delta",
    "current_year",
    "pagerank.damping",
    "pagerank.tol",
    "pagerank.max_iter",
    "trainer",
    "c_grid",
    "folds",
    "inner_folds",
    "seed",
    "mask",
    "listwise.epsilon",
    "listwise.max_iter",
];

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("{key}: cannot parse {value:?}")))
}

pub fn parse_c_grid(value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| num::<f64>("c_grid", s))
        .collect()
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "bm25.k1" => self.bm25.k1 = num(key, value)?,
            "bm25.b" => self.bm25.b = num(key, value)?,
            "index.gamma" => self.gamma = num(key, value)?,
            "index.delta" => self.delta = num(key, value)?,
            "current_year" => self.current_year = Some(num(key, value)?),
            "pagerank.damping" => self.pagerank.damping = num(key, value)?,
            "pagerank.tol" => self.pagerank.tol = num(key, value)?,
            "pagerank.max_iter" => self.pagerank.max_iter = num(key, value)?,
            "trainer" => self.trainer = value.parse()?,
            "c_grid" => self.c_grid = parse_c_grid(value)?,
            "folds" => self.folds = num(key, value)?,
            "inner_folds" => self.inner_folds = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "mask" => self.mask = value.parse()?,
            "listwise.epsilon" => self.listwise_epsilon = num(key, value)?,
            "listwise.max_iter" => self.listwise_max_iter = num(key, value)?,
            _ => return Err(Error::InvalidArgument(format!("unknown configuration key {key:?}"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str, source: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(source, i + 1, format!("expected key = value, got {line:?}")))?;
            self.set(k.trim(), v).map_err(|e| Error::parse(source, i + 1, e.to_string()))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.apply_text(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.bm25.k1 >= 0.0) || !(0.0..=1.0).contains(&self.bm25.b) {
            return bad(format!("bm25 needs k1 >= 0 and 0 <= b <= 1, got k1={} b={}", self.bm25.k1, self.bm25.b));
        }
        if !(self.listwise_epsilon > 0.0) || self.listwise_max_iter == 0 {
            return bad("listwise epsilon and max_iter must be positive".into());
        }
        if self.c_grid.is_empty() || self.c_grid.iter().any(|c| !(*c > 0.0 && c.is_finite())) {
            return bad(format!("C grid must hold positive values, got {:?}", self.c_grid));
        }
        self.index_params(0).validate()
    }

    pub fn index_params(&self, default_year: i32) -> IndexParams {
        IndexParams {
            gamma: self.gamma,
            delta: self.delta,
            current_year: self.current_year.unwrap_or(default_year),
        }
    }

    pub fn feature_config(&self, corpus: &crate::corpus::Corpus) -> FeatureConfig {
        FeatureConfig {
            bm25: self.bm25,
            indices: self.index_params(corpus.max_year().unwrap_or(0)),
            pagerank: self.pagerank,
        }
    }

    pub fn trainer_config(&self) -> TrainerConfig {
        let mut t = TrainerConfig::new(self.trainer);
        t.listwise.epsilon = self.listwise_epsilon;
        t.listwise.max_iter = self.listwise_max_iter;
        t
    }

    pub fn cv_config(&self) -> CvConfig {
        CvConfig {
            folds: self.folds,
            c_grid: self.c_grid.clone(),
            seed: self.seed,
            inner_folds: self.inner_folds,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_override() {
        let mut c = RunConfig::default();
        c.apply_text("# experiment\nbm25.k1 = 2.0\nc_grid=0.5, 5\ntrainer = listwise # inline\n\nmask=text,graph\n", "cfg")
            .unwrap();
        assert_eq!(c.bm25.k1, 2.0);
        assert_eq!(c.c_grid, [0.5, 5.0]);
        assert_eq!(c.trainer, ModelKind::Listwise);
        assert!(!c.mask.profile && c.mask.text);
        c.set("trainer", "pairwise").unwrap();
        assert_eq!(c.trainer, ModelKind::Pairwise);
        c.validate().unwrap();
    }

    #[test]
    fn every_documented_key_is_accepted() {
        let values = ["1", "0.5", "4", "1", "2010", "0.5", "1e-9", "100", "pairwise", "1,10", "4", "3", "9", "all", "0.001", "50"];
        let mut c = RunConfig::default();
        for (k, v) in CONFIG_KEYS.iter().zip(values) {
            c.set(k, v).unwrap();
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        let mut c = RunConfig::default();
        let e = c.apply_text("seed = 1\nbogus = 2\n", "cfg").unwrap_err();
        assert!(e.to_string().starts_with("cfg:2:"), "{e}");
        assert!(c.apply_text("seed 1", "cfg").is_err());
        c.c_grid = vec![0.0];
        assert!(c.validate().is_err());
    }
}
