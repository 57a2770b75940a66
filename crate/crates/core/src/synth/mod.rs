//! Synthetic conferences with planted ground truth.
//!
//! Scores follow the linear model
//! `score = α0 + α1·quality + Σ αj·covariate_j + α*·citation + σ0·ε`
//! with a latent per-submission quality. The generator keeps the continuous
//! (latent) score alongside the rounded, clamped Likert score so estimator
//! checks can run on either channel.

mod corpus;
mod generate;
mod render;

pub use corpus::{reference_corpus, CorpusConfig, ReferenceCorpus, RenderedEntry};
pub use generate::{
    generate, Coefficients, CovariateParams, GeneratedConference, GeneratorConfig, GroundTruth,
    MissingnessRates, PairTruth, QualityDistribution,
};
pub use render::{render_entry, AuthorName, CitationFormat};
