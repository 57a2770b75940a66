//! Review data model: venues, reviewers, submissions and review records.
//!
//! A [`ReviewDataset`] is immutable once validated. Venue-specific analysis
//! covariates are attached by [`derive_covariates`].

mod covariates;
pub mod io;
mod summary;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

pub use covariates::{covariate_names, derive_covariates, DerivedCovariates};
pub use io::{load_dataset, save_dataset};
pub(crate) use summary::group_thousands;
pub use summary::{summarize, SummaryTable};

use crate::error::{Error, Result};
use crate::ids::{Pair, ReviewerId, SubmissionId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VenuePolicy {
    /// Missing preferences are kept and encoded; reviewer form carries a
    /// missing-citation flag.
    #[serde(rename = "EC_LIKE")]
    EcLike,
    /// Pairs with any missing covariate are dropped.
    #[serde(rename = "ICML_LIKE")]
    IcmlLike,
}

impl VenuePolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            VenuePolicy::EcLike => "EC_LIKE",
            VenuePolicy::IcmlLike => "ICML_LIKE",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntRange {
    pub min: i32,
    pub max: i32,
}

impl IntRange {
    pub const fn new(min: i32, max: i32) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, v: i32) -> bool {
        (self.min..=self.max).contains(&v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VenueConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub score_min: i32,
    pub score_max: i32,
    pub venue_policy: VenuePolicy,
    pub expertise_scale: IntRange,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bid_scale: Option<IntRange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preference_range: Option<IntRange>,
}

impl VenueConfig {
    /// 5-point scale, preferences in -100..=100.
    pub fn ec_like() -> Self {
        Self {
            label: Some("EC-like".into()),
            score_min: 1,
            score_max: 5,
            venue_policy: VenuePolicy::EcLike,
            expertise_scale: IntRange::new(1, 4),
            bid_scale: None,
            preference_range: Some(IntRange::new(-100, 100)),
        }
    }

    /// 6-point scale, bids in 2..=5.
    pub fn icml_like() -> Self {
        Self {
            label: Some("ICML-like".into()),
            score_min: 1,
            score_max: 6,
            venue_policy: VenuePolicy::IcmlLike,
            expertise_scale: IntRange::new(1, 4),
            bid_scale: Some(IntRange::new(2, 5)),
            preference_range: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.score_min >= self.score_max {
            return Err(Error::Validation(format!(
                "venue config: score_min {} must be below score_max {}",
                self.score_min, self.score_max
            )));
        }
        let ranges = [
            ("expertise_scale", Some(self.expertise_scale)),
            ("bid_scale", self.bid_scale),
            ("preference_range", self.preference_range),
        ];
        for (name, range) in ranges {
            if let Some(r) = range {
                if r.min > r.max {
                    return Err(Error::Validation(format!(
                        "venue config: {name} has min {} above max {}",
                        r.min, r.max
                    )));
                }
            }
        }
        Ok(())
    }

    /// Largest possible magnitude of a cited-minus-uncited score difference.
    pub fn score_span(&self) -> f64 {
        f64::from(self.score_max - self.score_min)
    }

    pub fn label(&self) -> &str {
        self.label
            .as_deref()
            .unwrap_or_else(|| self.venue_policy.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reviewer {
    pub id: ReviewerId,
    pub last_name: String,
    pub first_name: String,
    pub seniority: u8,
    #[serde(default)]
    pub has_text_profile: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Submission {
    pub id: SubmissionId,
    #[serde(default)]
    pub reference_entries: Vec<String>,
    #[serde(default)]
    pub withdrawn: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReviewRecord {
    pub submission_id: SubmissionId,
    pub reviewer_id: ReviewerId,
    pub score: i32,
    pub sr_expertise: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sr_confidence: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text_overlap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bid: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preference_value: Option<i32>,
    #[serde(default)]
    pub missing_citation_flag: bool,
    #[serde(default)]
    pub exclusion_adjudicated: bool,
}

impl ReviewRecord {
    pub fn pair(&self) -> Pair {
        Pair {
            submission_id: self.submission_id.clone(),
            reviewer_id: self.reviewer_id.clone(),
        }
    }

    /// Reported preference. A stored 0 means "not reported".
    pub fn reported_preference(&self) -> Option<i32> {
        self.preference_value.filter(|&v| v != 0)
    }
}

/// Validated review data for one venue.
#[derive(Debug, Clone, PartialEq)]
pub struct ReviewDataset {
    pub config: VenueConfig,
    pub reviewers: Vec<Reviewer>,
    pub submissions: Vec<Submission>,
    pub reviews: Vec<ReviewRecord>,
    /// Parallel to `reviews`; present after [`derive_covariates`].
    pub covariates: Option<Vec<DerivedCovariates>>,
}

impl ReviewDataset {
    pub fn new(
        config: VenueConfig,
        reviewers: Vec<Reviewer>,
        submissions: Vec<Submission>,
        reviews: Vec<ReviewRecord>,
    ) -> Result<Self> {
        let dataset = Self {
            config,
            reviewers,
            submissions,
            reviews,
            covariates: None,
        };
        dataset.validate()?;
        Ok(dataset)
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        (self.reviewers.len(), self.submissions.len(), self.reviews.len())
    }

    pub fn reviewer_index(&self) -> HashMap<&ReviewerId, &Reviewer> {
        self.reviewers.iter().map(|r| (&r.id, r)).collect()
    }

    pub fn submission_index(&self) -> HashMap<&SubmissionId, &Submission> {
        self.submissions.iter().map(|s| (&s.id, s)).collect()
    }

    /// Assigned pairs, i.e. one per review record.
    pub fn assigned_pairs(&self) -> BTreeSet<Pair> {
        self.reviews.iter().map(ReviewRecord::pair).collect()
    }

    /// Assigned pairs on submissions that were not withdrawn.
    pub fn active_pairs(&self) -> BTreeSet<Pair> {
        let subs = self.submission_index();
        self.reviews
            .iter()
            .filter(|r| subs.get(&r.submission_id).is_some_and(|s| !s.withdrawn))
            .map(ReviewRecord::pair)
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        let cfg = &self.config;

        let mut reviewer_ids = BTreeSet::new();
        for r in &self.reviewers {
            if !reviewer_ids.insert(&r.id) {
                return Err(Error::Validation(format!("duplicate reviewer id {}", r.id)));
            }
            if r.last_name.trim().is_empty() {
                return Err(Error::Validation(format!("reviewer {}: empty last_name", r.id)));
            }
            if r.seniority > 1 {
                return Err(Error::Validation(format!(
                    "reviewer {}: seniority {} not in {{0,1}}",
                    r.id, r.seniority
                )));
            }
        }
        let mut submission_ids = BTreeSet::new();
        for s in &self.submissions {
            if !submission_ids.insert(&s.id) {
                return Err(Error::Validation(format!("duplicate submission id {}", s.id)));
            }
        }

        let mut seen_pairs = BTreeSet::new();
        for (i, rec) in self.reviews.iter().enumerate() {
            let name = || format!("review #{} {}", i + 1, rec.pair());
            if !submission_ids.contains(&rec.submission_id) {
                return Err(Error::Referential(format!(
                    "{}: unknown submission {}",
                    name(),
                    rec.submission_id
                )));
            }
            if !reviewer_ids.contains(&rec.reviewer_id) {
                return Err(Error::Referential(format!(
                    "{}: unknown reviewer {}",
                    name(),
                    rec.reviewer_id
                )));
            }
            if !seen_pairs.insert((&rec.submission_id, &rec.reviewer_id)) {
                return Err(Error::Validation(format!("{}: duplicate review for pair", name())));
            }
            if rec.score < cfg.score_min || rec.score > cfg.score_max {
                return Err(Error::Validation(format!(
                    "{}: score {} outside [{}, {}]",
                    name(),
                    rec.score,
                    cfg.score_min,
                    cfg.score_max
                )));
            }
            if !cfg.expertise_scale.contains(rec.sr_expertise) {
                return Err(Error::Validation(format!(
                    "{}: sr_expertise {} outside [{}, {}]",
                    name(),
                    rec.sr_expertise,
                    cfg.expertise_scale.min,
                    cfg.expertise_scale.max
                )));
            }
            if let Some(c) = rec.sr_confidence {
                if !cfg.expertise_scale.contains(c) {
                    return Err(Error::Validation(format!(
                        "{}: sr_confidence {c} outside expertise scale",
                        name()
                    )));
                }
            }
            if let Some(t) = rec.text_overlap {
                if !(0.0..=1.0).contains(&t) {
                    return Err(Error::Validation(format!(
                        "{}: text_overlap {t} outside [0, 1]",
                        name()
                    )));
                }
            }
            if let (Some(b), Some(scale)) = (rec.bid, cfg.bid_scale) {
                if !scale.contains(b) {
                    return Err(Error::Validation(format!(
                        "{}: bid {b} outside [{}, {}]",
                        name(),
                        scale.min,
                        scale.max
                    )));
                }
            }
            if let (Some(p), Some(range)) = (rec.preference_value, cfg.preference_range) {
                if !range.contains(p) {
                    return Err(Error::Validation(format!(
                        "{}: preference_value {p} outside [{}, {}]",
                        name(),
                        range.min,
                        range.max
                    )));
                }
            }
            if rec.exclusion_adjudicated && !rec.missing_citation_flag {
                return Err(Error::Validation(format!(
                    "{}: exclusion_adjudicated set without missing_citation_flag",
                    name()
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn tiny() -> ReviewDataset {
        ReviewDataset::new(
            VenueConfig::ec_like(),
            vec![Reviewer {
                id: "r1".into(),
                last_name: "Doe".into(),
                first_name: "Jane".into(),
                seniority: 1,
                has_text_profile: true,
            }],
            vec![Submission {
                id: "s1".into(),
                reference_entries: vec!["Doe, J. A paper. 2020.".into()],
                withdrawn: false,
            }],
            vec![ReviewRecord {
                submission_id: "s1".into(),
                reviewer_id: "r1".into(),
                score: 4,
                sr_expertise: 3,
                sr_confidence: None,
                text_overlap: None,
                bid: None,
                preference_value: Some(40),
                missing_citation_flag: false,
                exclusion_adjudicated: false,
            }],
        )
        .unwrap()
    }

    #[test]
    fn identity_ingestion_counts() {
        assert_eq!(tiny().counts(), (1, 1, 1));
    }

    #[test]
    fn score_outside_scale_names_record() {
        let mut d = tiny();
        d.config = VenueConfig::icml_like();
        d.reviews[0].score = 7;
        d.reviews[0].preference_value = None;
        let err = d.validate().unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        let msg = err.to_string();
        assert!(msg.contains("(s1, r1)") && msg.contains("score 7"), "{msg}");
    }

    #[test]
    fn dangling_reviewer_is_referential() {
        let mut d = tiny();
        d.reviews[0].reviewer_id = "ghost".into();
        assert!(matches!(d.validate(), Err(Error::Referential(_))));
    }

    #[test]
    fn adjudication_requires_flag() {
        let mut d = tiny();
        d.reviews[0].exclusion_adjudicated = true;
        assert!(d.validate().is_err());
        d.reviews[0].missing_citation_flag = true;
        assert!(d.validate().is_ok());
    }

    #[test]
    fn inverted_score_scale_rejected() {
        let mut cfg = VenueConfig::ec_like();
        cfg.score_min = 5;
        cfg.score_max = 5;
        assert!(cfg.validate().is_err());
        assert_eq!(VenueConfig::ec_like().score_span(), 4.0);
        assert_eq!(VenueConfig::icml_like().score_span(), 5.0);
    }
}
