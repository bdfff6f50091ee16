use crate::corpus::{Corpus, VenueKind};
use crate::error::Result;
use crate::metrics::{
    author_citation_stats, author_indices, career_span, career_years, pagerank, CitationGraph, IndexParams,
    InstitutionTable, PageRank, PageRankParams,
};
use crate::scalar::Scalar;
use crate::text::{inverse_document_frequency, Bm25Params, Query, StreamKind, TextIndex};

use super::{FeatureMask, FeatureVector, FEATURE_COUNT};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeatureConfig {
    pub bm25: Bm25Params,
    pub indices: IndexParams,
    pub pagerank: PageRankParams,
}

impl FeatureConfig {
    /// Defaults with the reference year taken from the corpus.
    pub fn for_corpus(corpus: &Corpus) -> Self {
        FeatureConfig {
            bm25: Bm25Params::default(),
            indices: IndexParams::new(corpus.max_year().unwrap_or(0)),
            pagerank: PageRankParams::default(),
        }
    }
}

/// Query-level quantities shared by every author of a query.
#[derive(Clone, Debug)]
pub struct QueryContext<T> {
    pub query: Query,
    matching: Vec<bool>,
    pub idf_title: T,
    pub idf_abstract: T,
    pub unique_authors: usize,
    pub hb_index: usize,
}

impl<T> QueryContext<T> {
    pub fn matches(&self, pub_idx: usize) -> bool {
        self.matching[pub_idx]
    }
}

/// Corpus-wide caches needed to fill feature vectors.
pub struct FeatureExtractor<'c, T> {
    corpus: &'c Corpus,
    text: TextIndex,
    pagerank: PageRank<T>,
    institutions: InstitutionTable<T>,
    config: FeatureConfig,
}

impl<'c, T: Scalar> FeatureExtractor<'c, T> {
    pub fn new(corpus: &'c Corpus, config: FeatureConfig) -> Result<Self> {
        config.indices.validate()?;
        let graph = CitationGraph::<T>::from_corpus(corpus);
        let pagerank = pagerank(&graph, &config.pagerank)?;
        Ok(FeatureExtractor {
            corpus,
            text: TextIndex::build(corpus),
            pagerank,
            institutions: InstitutionTable::build(corpus),
            config,
        })
    }

    pub fn corpus(&self) -> &'c Corpus {
        self.corpus
    }

    pub fn text(&self) -> &TextIndex {
        &self.text
    }

    pub fn pagerank(&self) -> &PageRank<T> {
        &self.pagerank
    }

    pub fn config(&self) -> &FeatureConfig {
        &self.config
    }

    pub fn query_context(&self, query: &Query) -> Result<QueryContext<T>> {
        let matching: Vec<bool> = (0..self.corpus.num_publications())
            .map(|p| self.text.matches(query, p))
            .collect();
        let counts: Vec<usize> = matching
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(p, _)| self.corpus.citation_count(p))
            .collect();
        let mut authors = std::collections::BTreeSet::new();
        for (p, _) in matching.iter().enumerate().filter(|(_, &m)| m) {
            authors.extend(self.corpus.authors_of(p).iter().copied());
        }
        Ok(QueryContext {
            query: query.clone(),
            idf_title: inverse_document_frequency(query, self.text.stats(StreamKind::Title))?,
            idf_abstract: inverse_document_frequency(query, self.text.stats(StreamKind::Abstract))?,
            unique_authors: authors.len(),
            hb_index: crate::metrics::h_index(&counts),
            matching,
        })
    }

    pub fn extract(&self, query: &Query, author_id: &str) -> Result<FeatureVector<T>> {
        let author = self.corpus.require_author(author_id)?;
        let ctx = self.query_context(query)?;
        Ok(self.vector(&ctx, author, FeatureMask::ALL))
    }

    pub fn vector(&self, ctx: &QueryContext<T>, author: usize, mask: FeatureMask) -> FeatureVector<T> {
        let mut values = self.values(ctx, author);
        mask.apply(&mut values);
        FeatureVector {
            query_id: ctx.query.id.clone(),
            author_id: self.corpus.author(author).id.clone(),
            values,
            label: None,
        }
    }

    /// Every slot of [`super::FEATURES`] for one author, unmasked.
    pub fn values(&self, ctx: &QueryContext<T>, author: usize) -> Vec<T> {
        let c = self.corpus;
        let q = &ctx.query;
        let n = T::of_usize;
        let pubs = c.publications_of(author);
        let bm25 = self.config.bm25;

        let span = career_span(c, author);
        let years = T::of(career_years(c, author) as f64);
        let mut venue = [[0usize; 2]; 2]; // [conference, journal] x [matching, not]
        let mut first_match = i32::MAX;
        let mut last_match = i32::MIN;
        let mut pr_sum = T::zero();
        let mut pr_count = 0usize;
        for &p in pubs {
            let publication = c.publication(p);
            let matched = ctx.matches(p);
            let kind = match publication.venue_kind {
                VenueKind::Conference => 0,
                VenueKind::Journal => 1,
            };
            venue[kind][usize::from(!matched)] += 1;
            if matched {
                first_match = first_match.min(publication.year);
                last_match = last_match.max(publication.year);
                pr_sum = pr_sum + self.pagerank.scores[p];
                pr_count += 1;
            }
        }
        let match_span = if pr_count == 0 { 0 } else { last_match - first_match };
        let pr_mean = if pr_count == 0 { T::zero() } else { pr_sum / n(pr_count) };

        let cites = author_citation_stats::<T>(c, &self.text, author, q);
        let idx = author_indices::<T>(c, author, &self.config.indices);
        let inst = self.institutions.for_author(c, author);

        let values = vec![
            self.text.author_bm25(c, q, author, StreamKind::Title, bm25),
            self.text.author_bm25(c, q, author, StreamKind::Abstract, bm25),
            self.text.author_term_frequency(c, q, author, StreamKind::Title),
            self.text.author_term_frequency(c, q, author, StreamKind::Abstract),
            ctx.idf_title,
            ctx.idf_abstract,
            n(self.text.author_doc_length(c, author, StreamKind::Title)),
            n(self.text.author_doc_length(c, author, StreamKind::Abstract)),
            n(ctx.unique_authors),
            T::of(match_span as f64),
            T::of(span as f64),
            n(venue[0][0] + venue[0][1]) / years,
            n(venue[1][0] + venue[1][1]) / years,
            n(venue[0][0]),
            n(venue[0][1]),
            n(venue[1][0]),
            n(venue[1][1]),
            n(cites.total),
            cites.avg,
            n(cites.max),
            cites.per_year,
            n(cites.collaborators),
            n(idx.h),
            n(inst.h),
            n(ctx.hb_index),
            n(idx.contemporary),
            n(idx.trend),
            idx.individual,
            idx.a,
            inst.a,
            n(idx.g),
            n(inst.g),
            idx.e,
            pr_sum,
            pr_mean,
        ];
        debug_assert_eq!(values.len(), FEATURE_COUNT);
        values
    }
}
