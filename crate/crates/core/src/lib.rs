//! Expert finding as learning to rank: a publication/citation corpus, text
//! relevance and bibliometric features per (query, author) pair, and linear
//! pairwise or listwise max-margin rankers with query-level evaluation.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the type
//! aliases below fix it to `f64`, which the command-line tool uses.

pub mod cli;
pub mod corpus;
pub mod error;
pub mod features;
pub mod l2r;
pub mod metrics;
pub mod scalar;
pub mod synth;
pub mod text;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Vector = features::FeatureVector<f64>;
pub type Pool = features::QueryPool<f64>;
pub type Model = l2r::RankingModel<f64>;
pub type Report = l2r::EvalReport;
pub type Extractor<'c> = features::FeatureExtractor<'c, f64>;

pub type VectorF32 = features::FeatureVector<f32>;
pub type PoolF32 = features::QueryPool<f32>;
pub type ModelF32 = l2r::RankingModel<f32>;
