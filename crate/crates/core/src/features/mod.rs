//! Per (query, author) feature vectors, training pools and the line-based
//! exchange format.

mod exchange;
mod extract;
mod sampling;

pub use exchange::{parse_vectors, read_vectors, write_feature_table, write_vectors, FEATURE_TABLE_VERSION};
pub use extract::{FeatureConfig, FeatureExtractor, QueryContext};
pub use sampling::{bm25_author_ranking, sample_negatives};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FeatureGroup {
    Text,
    Profile,
    Graph,
}

impl FeatureGroup {
    pub fn name(self) -> &'static str {
        match self {
            FeatureGroup::Text => "text",
            FeatureGroup::Profile => "profile",
            FeatureGroup::Graph => "graph",
        }
    }
}

use FeatureGroup::{Graph, Profile, Text};

/// Slot order of every feature vector. Index `i` here is written as feature
/// `i + 1` in the exchange format.
pub const FEATURES: [(&str, FeatureGroup); 35] = [
    ("bm25_title", Text),
    ("bm25_abstract", Text),
    ("tf_title", Text),
    ("tf_abstract", Text),
    ("idf_title", Text),
    ("idf_abstract", Text),
    ("doc_length_title", Text),
    ("doc_length_abstract", Text),
    ("unique_authors_matching", Text),
    ("matching_year_span", Text),
    ("career_span", Profile),
    ("conference_papers_per_year", Profile),
    ("journal_papers_per_year", Profile),
    ("conference_papers_matching", Profile),
    ("conference_papers_not_matching", Profile),
    ("journal_papers_matching", Profile),
    ("journal_papers_not_matching", Profile),
    ("citations_total_matching", Graph),
    ("citations_avg_matching", Graph),
    ("citations_max_matching", Graph),
    ("citations_per_year", Graph),
    ("collaborators", Graph),
    ("h_index", Graph),
    ("h_index_institution", Graph),
    ("hb_index_query", Graph),
    ("contemporary_h_index", Graph),
    ("trend_h_index", Graph),
    ("individual_h_index", Graph),
    ("a_index", Graph),
    ("a_index_institution", Graph),
    ("g_index", Graph),
    ("g_index_institution", Graph),
    ("e_index", Graph),
    ("pagerank_sum_matching", Graph),
    ("pagerank_mean_matching", Graph),
];

pub const FEATURE_COUNT: usize = FEATURES.len();

/// Slot of a feature by name.
pub fn feature_index(name: &str) -> Option<usize> {
    FEATURES.iter().position(|(n, _)| *n == name)
}

/// Which feature groups keep their values; masked slots are zeroed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FeatureMask {
    pub text: bool,
    pub profile: bool,
    pub graph: bool,
}

impl FeatureMask {
    pub const ALL: FeatureMask = FeatureMask {
        text: true,
        profile: true,
        graph: true,
    };

    pub fn only(group: FeatureGroup) -> Self {
        FeatureMask {
            text: group == Text,
            profile: group == Profile,
            graph: group == Graph,
        }
    }

    pub fn keeps(&self, group: FeatureGroup) -> bool {
        match group {
            Text => self.text,
            Profile => self.profile,
            Graph => self.graph,
        }
    }

    pub fn apply<T: Scalar>(&self, values: &mut [T]) {
        for (v, (_, group)) in values.iter_mut().zip(FEATURES.iter()) {
            if !self.keeps(*group) {
                *v = T::zero();
            }
        }
    }
}

impl Default for FeatureMask {
    fn default() -> Self {
        FeatureMask::ALL
    }
}

impl FromStr for FeatureMask {
    type Err = Error;

    /// Comma-separated group names, e.g. `text,graph`, or `all`.
    fn from_str(s: &str) -> Result<Self> {
        let mut mask = FeatureMask {
            text: false,
            profile: false,
            graph: false,
        };
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "text" => mask.text = true,
                "profile" => mask.profile = true,
                "graph" => mask.graph = true,
                "all" => mask = FeatureMask::ALL,
                other => return Err(Error::InvalidArgument(format!("unknown feature group {other:?}"))),
            }
        }
        if !(mask.text || mask.profile || mask.graph) {
            return Err(Error::InvalidArgument("feature mask selects no group".into()));
        }
        Ok(mask)
    }
}

impl fmt::Display for FeatureMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = [Text, Profile, Graph]
            .into_iter()
            .filter(|g| self.keeps(*g))
            .map(FeatureGroup::name)
            .collect();
        f.write_str(&names.join(","))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector<T = f64> {
    pub query_id: String,
    pub author_id: String,
    pub values: Vec<T>,
    pub label: Option<bool>,
}

impl<T: Scalar> FeatureVector<T> {
    pub fn is_relevant(&self) -> bool {
        self.label == Some(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Judgment {
    pub query_id: String,
    pub author_id: String,
    pub relevant: bool,
}

/// All judged vectors of one query.
#[derive(Clone, Debug, PartialEq)]
pub struct QueryPool<T = f64> {
    pub query_id: String,
    pub vectors: Vec<FeatureVector<T>>,
}

impl<T: Scalar> QueryPool<T> {
    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, |v| v.values.len())
    }

    pub fn num_relevant(&self) -> usize {
        self.vectors.iter().filter(|v| v.is_relevant()).count()
    }

    /// At least one relevant and one non-relevant vector.
    pub fn is_trainable(&self) -> bool {
        let rel = self.num_relevant();
        rel > 0 && rel < self.vectors.len()
    }
}

/// Per-feature min-max scaling to `[0, 1]` within the pool; constant
/// features become 0.
pub fn normalize_pool<T: Scalar>(pool: &QueryPool<T>) -> QueryPool<T> {
    let mut out = pool.clone();
    let dim = pool.dim();
    for j in 0..dim {
        let (lo, hi) = pool
            .vectors
            .iter()
            .map(|v| v.values[j])
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), x| (lo.min(x), hi.max(x)));
        let range = hi - lo;
        for v in &mut out.vectors {
            v.values[j] = if range > T::zero() {
                (v.values[j] - lo) / range
            } else {
                T::zero()
            };
        }
    }
    out
}
