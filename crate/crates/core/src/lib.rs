//! Citation-bias audit toolkit for conference peer review.
//!
//! The pipeline: load a [`dataset`], establish who is cited where
//! ([`citation`]), optionally compute a citation-aware reviewer assignment
//! ([`assignment`]), filter to analyzable submissions ([`filter`]), and test
//! for a cited-reviewer score shift with the differenced weighted regression
//! ([`parametric`]) or the matched-pair permutation test ([`nonparametric`]).
//! [`synth`] generates conferences with planted ground truth.

pub mod assignment;
pub mod citation;
pub mod dataset;
pub mod effect_size;
pub mod error;
pub mod filter;
pub mod ids;
pub mod nonparametric;
pub mod parametric;
pub mod report;
pub mod synth;

pub use error::{Error, Result, Warning};
pub use ids::{Pair, ReviewerId, SubmissionId};
