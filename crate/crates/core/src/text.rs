//! Tokenization and the textual relevance scores: TF, IDF and BM25 over the
//! title and abstract streams.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::corpus::{Corpus, Publication};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Lowercases and splits on every non-alphanumeric character. No stemming,
/// no stopwords.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StreamKind {
    Title,
    Abstract,
}

impl StreamKind {
    pub const ALL: [StreamKind; 2] = [StreamKind::Title, StreamKind::Abstract];

    pub fn text(self, p: &Publication) -> &str {
        match self {
            StreamKind::Title => &p.title,
            StreamKind::Abstract => &p.abstract_text,
        }
    }
}

/// A query as the ordered set of its distinct normalized terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub id: String,
    pub terms: Vec<String>,
}

impl Query {
    pub fn new(id: impl Into<String>, text: &str) -> Result<Self> {
        Query::from_terms(id, tokenize(text))
    }

    pub fn from_terms(id: impl Into<String>, terms: Vec<String>) -> Result<Self> {
        let id = id.into();
        let mut seen = HashSet::new();
        let terms: Vec<String> = terms.into_iter().filter(|t| seen.insert(t.clone())).collect();
        if terms.is_empty() {
            return Err(Error::Validation(format!("query {id} has no terms")));
        }
        Ok(Query { id, terms })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params { k1: 1.2, b: 0.75 }
    }
}

/// Bag of words for one document in one stream.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DocTerms {
    pub counts: HashMap<String, u32>,
    pub len: usize,
}

impl DocTerms {
    pub fn from_tokens(tokens: &[String]) -> Self {
        let mut counts = HashMap::new();
        for t in tokens {
            *counts.entry(t.clone()).or_insert(0) += 1;
        }
        DocTerms {
            counts,
            len: tokens.len(),
        }
    }

    pub fn from_text(text: &str) -> Self {
        DocTerms::from_tokens(&tokenize(text))
    }

    pub fn freq(&self, term: &str) -> u32 {
        self.counts.get(term).copied().unwrap_or(0)
    }
}

/// Collection statistics of one stream.
#[derive(Clone, Debug, PartialEq)]
pub struct TermStats {
    pub stream: StreamKind,
    pub doc_count: usize,
    pub doc_freq: HashMap<String, usize>,
    total_len: usize,
}

impl TermStats {
    pub fn new(stream: StreamKind) -> Self {
        TermStats {
            stream,
            doc_count: 0,
            doc_freq: HashMap::new(),
            total_len: 0,
        }
    }

    pub fn add_document(&mut self, doc: &DocTerms) {
        self.doc_count += 1;
        self.total_len += doc.len;
        for term in doc.counts.keys() {
            *self.doc_freq.entry(term.clone()).or_insert(0) += 1;
        }
    }

    pub fn avg_doc_len(&self) -> f64 {
        if self.doc_count == 0 {
            0.0
        } else {
            self.total_len as f64 / self.doc_count as f64
        }
    }

    pub fn df(&self, term: &str) -> usize {
        self.doc_freq.get(term).copied().unwrap_or(0)
    }
}

/// Σ_i ln(|D| / f_i), with unseen terms counted as if present in one document.
pub fn inverse_document_frequency<T: Scalar>(query: &Query, stats: &TermStats) -> Result<T> {
    if stats.doc_count == 0 {
        return Err(Error::Validation("IDF over an empty collection".into()));
    }
    let n = T::of_usize(stats.doc_count);
    Ok(query
        .terms
        .iter()
        .map(|t| (n / T::of_usize(stats.df(t).max(1))).ln())
        .fold(T::zero(), |a, b| a + b))
}

/// Okapi BM25 of one document with relative term frequencies and the
/// unclamped `ln((N - n_i + 0.5) / (n_i + 0.5))` weight. Empty documents
/// score 0.
pub fn bm25<T: Scalar>(query: &Query, doc: &DocTerms, stats: &TermStats, params: Bm25Params) -> T {
    if doc.len == 0 {
        return T::zero();
    }
    let half = T::of(0.5);
    let k1 = T::of(params.k1);
    let b = T::of(params.b);
    let n = T::of_usize(stats.doc_count);
    let len = T::of_usize(doc.len);
    let avg = T::of(stats.avg_doc_len());
    let len_ratio = if avg > T::zero() { len / avg } else { T::zero() };
    let norm = k1 * (T::one() - b + b * len_ratio);
    let mut score = T::zero();
    for term in &query.terms {
        let f = doc.freq(term);
        if f == 0 {
            continue;
        }
        let df = T::of_usize(stats.df(term));
        let weight = ((n - df + half) / (df + half)).ln();
        let tf = T::of(f as f64) / len;
        score = score + weight * ((k1 + T::one()) * tf) / (tf + norm);
    }
    score
}

/// Σ_i Freq(i, d) / |d| for one document.
pub fn document_term_frequency<T: Scalar>(query: &Query, doc: &DocTerms) -> T {
    if doc.len == 0 {
        return T::zero();
    }
    let len = T::of_usize(doc.len);
    query
        .terms
        .iter()
        .map(|t| T::of(doc.freq(t) as f64) / len)
        .fold(T::zero(), |a, b| a + b)
}

/// Conjunctive match over the union of title and abstract tokens.
pub fn document_matches(query: &Query, doc: &Publication) -> bool {
    let tokens: HashSet<String> = tokenize(&doc.title)
        .into_iter()
        .chain(tokenize(&doc.abstract_text))
        .collect();
    query.terms.iter().all(|t| tokens.contains(t))
}

/// Tokenized view of a corpus with per-stream statistics.
#[derive(Clone, Debug)]
pub struct TextIndex {
    titles: Vec<DocTerms>,
    abstracts: Vec<DocTerms>,
    title_stats: TermStats,
    abstract_stats: TermStats,
}

impl TextIndex {
    pub fn build(corpus: &Corpus) -> Self {
        let mut title_stats = TermStats::new(StreamKind::Title);
        let mut abstract_stats = TermStats::new(StreamKind::Abstract);
        let mut titles = Vec::with_capacity(corpus.num_publications());
        let mut abstracts = Vec::with_capacity(corpus.num_publications());
        for p in corpus.publications() {
            let t = DocTerms::from_text(&p.title);
            let a = DocTerms::from_text(&p.abstract_text);
            title_stats.add_document(&t);
            abstract_stats.add_document(&a);
            titles.push(t);
            abstracts.push(a);
        }
        TextIndex {
            titles,
            abstracts,
            title_stats,
            abstract_stats,
        }
    }

    pub fn doc(&self, stream: StreamKind, pub_idx: usize) -> &DocTerms {
        match stream {
            StreamKind::Title => &self.titles[pub_idx],
            StreamKind::Abstract => &self.abstracts[pub_idx],
        }
    }

    pub fn stats(&self, stream: StreamKind) -> &TermStats {
        match stream {
            StreamKind::Title => &self.title_stats,
            StreamKind::Abstract => &self.abstract_stats,
        }
    }

    pub fn matches(&self, query: &Query, pub_idx: usize) -> bool {
        let (t, a) = (&self.titles[pub_idx], &self.abstracts[pub_idx]);
        query
            .terms
            .iter()
            .all(|term| t.counts.contains_key(term) || a.counts.contains_key(term))
    }

    /// Indices of all publications matching the query, in id order.
    pub fn matching_publications(&self, query: &Query) -> Vec<usize> {
        (0..self.titles.len()).filter(|&p| self.matches(query, p)).collect()
    }

    /// TF of an author: summed relative term frequency over Docs(a).
    pub fn term_frequency<T: Scalar>(&self, corpus: &Corpus, query: &Query, author_id: &str, stream: StreamKind) -> Result<T> {
        let a = corpus.require_author(author_id)?;
        Ok(self.author_term_frequency(corpus, query, a, stream))
    }

    pub fn author_term_frequency<T: Scalar>(&self, corpus: &Corpus, query: &Query, author: usize, stream: StreamKind) -> T {
        corpus
            .publications_of(author)
            .iter()
            .map(|&p| document_term_frequency::<T>(query, self.doc(stream, p)))
            .fold(T::zero(), |a, b| a + b)
    }

    pub fn bm25<T: Scalar>(&self, query: &Query, pub_idx: usize, stream: StreamKind, params: Bm25Params) -> T {
        bm25(query, self.doc(stream, pub_idx), self.stats(stream), params)
    }

    /// Sum of per-document BM25 over Docs(a).
    pub fn author_bm25<T: Scalar>(
        &self,
        corpus: &Corpus,
        query: &Query,
        author: usize,
        stream: StreamKind,
        params: Bm25Params,
    ) -> T {
        self.author_bm25_with(corpus, query, author, stream, self.stats(stream), params)
    }

    /// As [`TextIndex::author_bm25`] but against externally supplied statistics.
    pub fn author_bm25_with<T: Scalar>(
        &self,
        corpus: &Corpus,
        query: &Query,
        author: usize,
        stream: StreamKind,
        stats: &TermStats,
        params: Bm25Params,
    ) -> T {
        corpus
            .publications_of(author)
            .iter()
            .map(|&p| bm25::<T>(query, self.doc(stream, p), stats, params))
            .fold(T::zero(), |a, b| a + b)
    }

    /// Total token count of the author's publications in a stream.
    pub fn author_doc_length(&self, corpus: &Corpus, author: usize, stream: StreamKind) -> usize {
        corpus.publications_of(author).iter().map(|&p| self.doc(stream, p).len).sum()
    }

    /// Distinct authors over all publications matching the query.
    pub fn unique_authors_matching(&self, corpus: &Corpus, query: &Query) -> usize {
        let mut authors = BTreeSet::new();
        for p in self.matching_publications(query) {
            authors.extend(corpus.authors_of(p).iter().copied());
        }
        authors.len()
    }

    /// Latest minus earliest year among the author's matching publications,
    /// 0 when fewer than two match.
    pub fn matching_year_span(&self, corpus: &Corpus, query: &Query, author: usize) -> i32 {
        let years = corpus
            .publications_of(author)
            .iter()
            .filter(|&&p| self.matches(query, p))
            .map(|&p| corpus.publication(p).year);
        let (lo, hi) = years.fold((i32::MAX, i32::MIN), |(lo, hi), y| (lo.min(y), hi.max(y)));
        if lo > hi {
            0
        } else {
            hi - lo
        }
    }
}
