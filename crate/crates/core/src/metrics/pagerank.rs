//! Weighted PageRank over the publication citation graph.

use std::io::Write;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::scalar::{format_decimal, Scalar};

/// Directed graph with positive edge weights, stored by incoming edges.
#[derive(Clone, Debug, PartialEq)]
pub struct CitationGraph<T> {
    in_edges: Vec<Vec<(usize, T)>>,
    out_weight: Vec<T>,
    num_edges: usize,
}

impl<T: Scalar> CitationGraph<T> {
    pub fn new(num_nodes: usize) -> Self {
        CitationGraph {
            in_edges: vec![Vec::new(); num_nodes],
            out_weight: vec![T::zero(); num_nodes],
            num_edges: 0,
        }
    }

    /// One node per publication; `citing -> cited` weighted by the reciprocal
    /// of the citing paper's author count.
    pub fn from_corpus(corpus: &Corpus) -> Self {
        let mut g = CitationGraph::new(corpus.num_publications());
        for p in 0..corpus.num_publications() {
            let weight = T::one() / T::of_usize(corpus.authors_of(p).len());
            for &cited in corpus.cites(p) {
                g.add_edge(p, cited, weight).expect("corpus edges are valid");
            }
        }
        g
    }

    pub fn add_edge(&mut self, from: usize, to: usize, weight: T) -> Result<()> {
        let n = self.num_nodes();
        if from >= n || to >= n {
            return Err(Error::InvalidArgument(format!("edge {from}->{to} outside graph of {n} nodes")));
        }
        if !(weight > T::zero()) || !weight.is_finite() {
            return Err(Error::InvalidArgument(format!("edge weight must be positive, got {weight}")));
        }
        self.in_edges[to].push((from, weight));
        self.out_weight[from] = self.out_weight[from] + weight;
        self.num_edges += 1;
        Ok(())
    }

    pub fn num_nodes(&self) -> usize {
        self.in_edges.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    /// `(source, weight)` for every edge into `node`.
    pub fn in_edges(&self, node: usize) -> &[(usize, T)] {
        &self.in_edges[node]
    }

    pub fn out_weight(&self, node: usize) -> T {
        self.out_weight[node]
    }

    pub fn is_dangling(&self, node: usize) -> bool {
        self.out_weight[node] == T::zero()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PageRankParams {
    /// Probability of following a link; the jump term is `(1 - damping) / N`.
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PageRankParams {
    fn default() -> Self {
        PageRankParams {
            damping: 0.5,
            tol: 1e-9,
            max_iter: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PageRank<T> {
    pub scores: Vec<T>,
    pub iterations: usize,
    pub converged: bool,
    /// L1 change of the last iteration.
    pub residual: T,
}

/// Power iteration from the uniform vector. Mass on nodes without outgoing
/// links is spread uniformly over all nodes.
pub fn pagerank<T: Scalar>(graph: &CitationGraph<T>, params: &PageRankParams) -> Result<PageRank<T>> {
    let n = graph.num_nodes();
    if n == 0 {
        return Err(Error::InvalidArgument("pagerank of an empty graph".into()));
    }
    if !(params.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("pagerank tolerance must be positive, got {}", params.tol)));
    }
    if !(0.0..1.0).contains(&params.damping) {
        return Err(Error::InvalidArgument(format!("damping must lie in [0, 1), got {}", params.damping)));
    }
    let nt = T::of_usize(n);
    let d = T::of(params.damping);
    let jump = (T::one() - d) / nt;
    let tol = T::of(params.tol);

    let mut scores = vec![T::one() / nt; n];
    let mut next = vec![T::zero(); n];
    let mut residual = T::infinity();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < params.max_iter {
        let dangling = (0..n)
            .filter(|&j| graph.is_dangling(j))
            .map(|j| scores[j])
            .fold(T::zero(), |a, b| a + b);
        let base = jump + d * dangling / nt;
        for (i, slot) in next.iter_mut().enumerate() {
            let flow = graph
                .in_edges(i)
                .iter()
                .map(|&(j, w)| w * scores[j] / graph.out_weight(j))
                .fold(T::zero(), |a, b| a + b);
            *slot = base + d * flow;
        }
        residual = scores
            .iter()
            .zip(&next)
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), |a, b| a + b);
        std::mem::swap(&mut scores, &mut next);
        iterations += 1;
        if residual < tol {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("pagerank stopped after {iterations} iterations, residual {residual}");
    }
    Ok(PageRank {
        scores,
        iterations,
        converged,
        residual,
    })
}

/// `pub_id<TAB>score` lines in publication id order.
pub fn write_pagerank_tsv<T: Scalar, W: Write>(corpus: &Corpus, pr: &PageRank<T>, mut w: W) -> std::io::Result<()> {
    for (p, score) in corpus.publications().iter().zip(&pr.scores) {
        writeln!(w, "{}\t{}", p.id, format_decimal(*score))?;
    }
    Ok(())
}
