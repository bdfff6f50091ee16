//! Citation-based expertise estimators: citation counts, Hirsch-type
//! indices for authors, institutions and topics, and citation PageRank.

mod indices;
mod pagerank;

pub use indices::{
    a_index, contemporary_h_index, contemporary_scores, e_index, g_index, h_index, h_index_of_scores,
    individual_h_index, trend_h_index, trend_scores, IndexParams,
};
pub use pagerank::{pagerank, write_pagerank_tsv, CitationGraph, PageRank, PageRankParams};

use std::collections::{BTreeMap, BTreeSet};

use crate::corpus::Corpus;
use crate::error::Result;
use crate::scalar::Scalar;
use crate::text::{Query, TextIndex};

/// A publication with the years of the papers citing it.
#[derive(Clone, Debug, PartialEq)]
pub struct CitationRecord {
    pub pub_id: String,
    pub year: i32,
    pub citing: Vec<(String, i32)>,
}

impl CitationRecord {
    pub fn from_corpus(corpus: &Corpus, pub_idx: usize) -> Self {
        let p = corpus.publication(pub_idx);
        CitationRecord {
            pub_id: p.id.clone(),
            year: p.year,
            citing: corpus
                .cited_by(pub_idx)
                .iter()
                .map(|&c| {
                    let c = corpus.publication(c);
                    (c.id.clone(), c.year)
                })
                .collect(),
        }
    }

    pub fn citation_count(&self) -> usize {
        self.citing.len()
    }
}

fn author_citation_counts(corpus: &Corpus, author: usize) -> Vec<usize> {
    corpus.publications_of(author).iter().map(|&p| corpus.citation_count(p)).collect()
}

/// Latest minus earliest publication year; 0 for authors without papers.
pub fn career_span(corpus: &Corpus, author: usize) -> i32 {
    let years = corpus.publications_of(author).iter().map(|&p| corpus.publication(p).year);
    let (lo, hi) = years.fold((i32::MAX, i32::MIN), |(lo, hi), y| (lo.min(y), hi.max(y)));
    if lo > hi {
        0
    } else {
        hi - lo
    }
}

/// Divisor for per-year averages: the career span, at least one year.
pub fn career_years(corpus: &Corpus, author: usize) -> i32 {
    career_span(corpus, author).max(1)
}

/// Distinct co-authors across all of an author's papers.
pub fn collaborator_count(corpus: &Corpus, author: usize) -> usize {
    let mut others = BTreeSet::new();
    for &p in corpus.publications_of(author) {
        others.extend(corpus.authors_of(p).iter().copied().filter(|&a| a != author));
    }
    others.len()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CitationStats<T> {
    /// Citations of the author's papers that match the query.
    pub total: usize,
    pub avg: T,
    pub max: usize,
    /// All citations of the author divided by the career length in years.
    pub per_year: T,
    pub collaborators: usize,
}

pub fn citation_stats<T: Scalar>(corpus: &Corpus, index: &TextIndex, author_id: &str, query: &Query) -> Result<CitationStats<T>> {
    let a = corpus.require_author(author_id)?;
    Ok(author_citation_stats(corpus, index, a, query))
}

pub fn author_citation_stats<T: Scalar>(corpus: &Corpus, index: &TextIndex, author: usize, query: &Query) -> CitationStats<T> {
    let matching: Vec<usize> = corpus
        .publications_of(author)
        .iter()
        .filter(|&&p| index.matches(query, p))
        .map(|&p| corpus.citation_count(p))
        .collect();
    let total: usize = matching.iter().sum();
    let avg = if matching.is_empty() {
        T::zero()
    } else {
        T::of_usize(total) / T::of_usize(matching.len())
    };
    let all: usize = author_citation_counts(corpus, author).iter().sum();
    CitationStats {
        total,
        avg,
        max: matching.iter().copied().max().unwrap_or(0),
        per_year: T::of_usize(all) / T::of(career_years(corpus, author) as f64),
        collaborators: collaborator_count(corpus, author),
    }
}

/// Query-independent indices of one author.
#[derive(Clone, Debug, PartialEq)]
pub struct AuthorIndices<T> {
    pub h: usize,
    pub g: usize,
    pub a: T,
    pub e: T,
    pub contemporary: usize,
    pub trend: usize,
    pub individual: T,
    pub total_citations: usize,
}

pub fn author_indices<T: Scalar>(corpus: &Corpus, author: usize, params: &IndexParams) -> AuthorIndices<T> {
    let pubs = corpus.publications_of(author);
    let counts = author_citation_counts(corpus, author);
    let dated: Vec<(i32, usize)> = pubs
        .iter()
        .map(|&p| (corpus.publication(p).year, corpus.citation_count(p)))
        .collect();
    let citing_years: Vec<Vec<i32>> = pubs
        .iter()
        .map(|&p| corpus.cited_by(p).iter().map(|&c| corpus.publication(c).year).collect())
        .collect();
    let with_authors: Vec<(usize, usize)> = pubs
        .iter()
        .map(|&p| (corpus.citation_count(p), corpus.authors_of(p).len()))
        .collect();
    AuthorIndices {
        h: h_index(&counts),
        g: g_index(&counts),
        a: a_index(&counts),
        e: e_index(&counts),
        contemporary: contemporary_h_index::<T>(&dated, params),
        trend: trend_h_index::<T>(&citing_years, params),
        individual: individual_h_index(&with_authors),
        total_citations: counts.iter().sum(),
    }
}

pub fn author_h_index(corpus: &Corpus, author_id: &str) -> Result<usize> {
    let a = corpus.require_author(author_id)?;
    Ok(h_index(&author_citation_counts(corpus, a)))
}

pub fn author_contemporary_h_index<T: Scalar>(corpus: &Corpus, author_id: &str, params: &IndexParams) -> Result<usize> {
    let a = corpus.require_author(author_id)?;
    Ok(author_indices::<T>(corpus, a, params).contemporary)
}

pub fn author_trend_h_index<T: Scalar>(corpus: &Corpus, author_id: &str, params: &IndexParams) -> Result<usize> {
    let a = corpus.require_author(author_id)?;
    Ok(author_indices::<T>(corpus, a, params).trend)
}

pub fn author_individual_h_index<T: Scalar>(corpus: &Corpus, author_id: &str) -> Result<T> {
    let a = corpus.require_author(author_id)?;
    let with_authors: Vec<(usize, usize)> = corpus
        .publications_of(a)
        .iter()
        .map(|&p| (corpus.citation_count(p), corpus.authors_of(p).len()))
        .collect();
    Ok(individual_h_index(&with_authors))
}

/// h-index of the topic: computed over every publication matching the query.
pub fn hb_index(corpus: &Corpus, index: &TextIndex, query: &Query) -> usize {
    let counts: Vec<usize> = index
        .matching_publications(query)
        .into_iter()
        .map(|p| corpus.citation_count(p))
        .collect();
    h_index(&counts)
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstitutionIndices<T> {
    pub h: usize,
    pub a: T,
    pub g: usize,
}

impl<T: Scalar> InstitutionIndices<T> {
    fn zero() -> Self {
        InstitutionIndices {
            h: 0,
            a: T::zero(),
            g: 0,
        }
    }
}

/// Indices over the pooled publications of every author of an institution.
#[derive(Clone, Debug)]
pub struct InstitutionTable<T> {
    by_name: BTreeMap<String, InstitutionIndices<T>>,
}

impl<T: Scalar> InstitutionTable<T> {
    pub fn build(corpus: &Corpus) -> Self {
        let mut pubs: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
        for (i, a) in corpus.authors().iter().enumerate() {
            if let Some(inst) = &a.institution {
                pubs.entry(inst.clone()).or_default().extend(corpus.publications_of(i));
            }
        }
        let by_name = pubs
            .into_iter()
            .map(|(name, set)| {
                let counts: Vec<usize> = set.into_iter().map(|p| corpus.citation_count(p)).collect();
                let idx = InstitutionIndices {
                    h: h_index(&counts),
                    a: a_index(&counts),
                    g: g_index(&counts),
                };
                (name, idx)
            })
            .collect();
        InstitutionTable { by_name }
    }

    pub fn get(&self, institution: &str) -> Option<&InstitutionIndices<T>> {
        self.by_name.get(institution)
    }

    /// Indices of the author's institution; all zero without one.
    pub fn for_author(&self, corpus: &Corpus, author: usize) -> InstitutionIndices<T> {
        corpus
            .author(author)
            .institution
            .as_deref()
            .and_then(|i| self.get(i))
            .cloned()
            .unwrap_or_else(InstitutionIndices::zero)
    }
}
