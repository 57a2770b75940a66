use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{ReviewDataset, VenuePolicy};
use crate::error::Warning;
use crate::ids::ReviewerId;

pub const EXPERTISE: &str = "expertiseSRExp";
pub const CONFIDENCE: &str = "expertiseSRConf";
pub const TEXT_OVERLAP: &str = "expertiseText";
pub const PREF_BID: &str = "prefBid";
pub const PREF_PERC: &str = "prefPerc";
pub const MISSING_PREF: &str = "missingPref";
pub const SENIORITY: &str = "seniority";

/// Regression covariates per venue policy, in column order.
pub fn covariate_names(policy: VenuePolicy) -> &'static [&'static str] {
    match policy {
        VenuePolicy::EcLike => &[EXPERTISE, PREF_PERC, MISSING_PREF, SENIORITY],
        VenuePolicy::IcmlLike => &[EXPERTISE, CONFIDENCE, TEXT_OVERLAP, PREF_BID, SENIORITY],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedCovariates {
    /// 0 = top preference, 100 = bottom. EC-like only.
    pub pref_perc: Option<f64>,
    /// EC-like only.
    pub missing_pref: Option<u8>,
    /// Values in [`covariate_names`] order; `None` marks an ICML-like record
    /// missing a covariate (droppable).
    pub covariate_vector: Option<Vec<f64>>,
}

impl DerivedCovariates {
    pub fn droppable(&self) -> bool {
        self.covariate_vector.is_none()
    }
}

/// Percentile of `value` within `pool`: 100 × (#strictly greater) / (n − 1);
/// a singleton pool maps to 0.
fn percentile(value: i32, pool: &[i32]) -> f64 {
    if pool.len() <= 1 {
        return 0.0;
    }
    let greater = pool.iter().filter(|&&p| p > value).count();
    100.0 * greater as f64 / (pool.len() - 1) as f64
}

/// Attach venue-specific covariates to every review record.
///
/// Recomputes from raw fields, so applying it twice gives the same result.
pub fn derive_covariates(dataset: &ReviewDataset) -> (ReviewDataset, Vec<Warning>) {
    let mut warnings = Vec::new();
    let reviewers = dataset.reviewer_index();
    let policy = dataset.config.venue_policy;

    let mut positive_prefs: HashMap<&ReviewerId, Vec<i32>> = HashMap::new();
    if policy == VenuePolicy::EcLike {
        for rec in &dataset.reviews {
            if let Some(p) = rec.reported_preference().filter(|&p| p > 0) {
                positive_prefs.entry(&rec.reviewer_id).or_default().push(p);
            }
        }
    }

    let covariates = dataset
        .reviews
        .iter()
        .map(|rec| {
            let seniority = f64::from(reviewers[&rec.reviewer_id].seniority);
            let expertise = f64::from(rec.sr_expertise);
            match policy {
                VenuePolicy::EcLike => {
                    let (perc, missing) = match rec.reported_preference() {
                        None => (0.0, 1u8),
                        Some(p) if p < 0 => {
                            warnings.push(Warning::new(
                                rec.pair().to_string(),
                                format!("assigned despite negative preference {p}; placed at percentile 100"),
                            ));
                            (100.0, 0)
                        }
                        Some(p) => (percentile(p, &positive_prefs[&rec.reviewer_id]), 0),
                    };
                    DerivedCovariates {
                        pref_perc: Some(perc),
                        missing_pref: Some(missing),
                        covariate_vector: Some(vec![expertise, perc, f64::from(missing), seniority]),
                    }
                }
                VenuePolicy::IcmlLike => {
                    if rec.bid == Some(2) {
                        warnings.push(Warning::new(
                            rec.pair().to_string(),
                            "assigned despite bid 2 (not willing)",
                        ));
                    }
                    let vector = match (rec.sr_confidence, rec.text_overlap, rec.bid) {
                        (Some(c), Some(t), Some(b)) => {
                            Some(vec![expertise, f64::from(c), t, f64::from(b), seniority])
                        }
                        _ => None,
                    };
                    DerivedCovariates {
                        pref_perc: None,
                        missing_pref: None,
                        covariate_vector: vector,
                    }
                }
            }
        })
        .collect();

    let mut out = dataset.clone();
    out.covariates = Some(covariates);
    (out, warnings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{ReviewRecord, Reviewer, Submission, VenueConfig};

    fn record(sub: &str, rev: &str, pref: Option<i32>) -> ReviewRecord {
        ReviewRecord {
            submission_id: sub.into(),
            reviewer_id: rev.into(),
            score: 3,
            sr_expertise: 2,
            sr_confidence: None,
            text_overlap: None,
            bid: None,
            preference_value: pref,
            missing_citation_flag: false,
            exclusion_adjudicated: false,
        }
    }

    fn ec(reviews: Vec<ReviewRecord>) -> ReviewDataset {
        let subs = ["s1", "s2", "s3"]
            .iter()
            .map(|s| Submission {
                id: (*s).into(),
                reference_entries: vec![],
                withdrawn: false,
            })
            .collect();
        let revs = ["r1", "r2"]
            .iter()
            .map(|r| Reviewer {
                id: (*r).into(),
                last_name: "X".into(),
                first_name: "Y".into(),
                seniority: 0,
                has_text_profile: true,
            })
            .collect();
        ReviewDataset::new(VenueConfig::ec_like(), revs, subs, reviews).unwrap()
    }

    #[test]
    fn two_preferences_map_to_endpoints() {
        let d = ec(vec![record("s1", "r1", Some(50)), record("s2", "r1", Some(10))]);
        let (d, w) = derive_covariates(&d);
        let c = d.covariates.unwrap();
        assert!(w.is_empty());
        assert_eq!(c[0].pref_perc, Some(0.0));
        assert_eq!(c[1].pref_perc, Some(100.0));
    }

    #[test]
    fn singleton_preference_is_zero() {
        let d = ec(vec![record("s1", "r2", Some(77))]);
        let c = derive_covariates(&d).0.covariates.unwrap();
        assert_eq!(c[0].pref_perc, Some(0.0));
        assert_eq!(c[0].missing_pref, Some(0));
    }

    #[test]
    fn absent_or_zero_preference_is_missing() {
        let d = ec(vec![record("s1", "r1", None), record("s2", "r1", Some(0))]);
        let c = derive_covariates(&d).0.covariates.unwrap();
        for cov in &c {
            assert_eq!((cov.pref_perc, cov.missing_pref), (Some(0.0), Some(1)));
            assert_eq!(cov.covariate_vector.as_ref().unwrap()[2], 1.0);
        }
    }

    #[test]
    fn negative_preference_warns() {
        let d = ec(vec![record("s1", "r1", Some(-20)), record("s2", "r1", Some(30))]);
        let (d, w) = derive_covariates(&d);
        assert_eq!(w.len(), 1);
        let c = d.covariates.unwrap();
        assert_eq!(c[0].pref_perc, Some(100.0));
        assert_eq!(c[1].pref_perc, Some(0.0));
    }

    #[test]
    fn ties_share_percentile_and_ordering_is_weakly_decreasing() {
        let d = ec(vec![
            record("s1", "r1", Some(30)),
            record("s2", "r1", Some(30)),
            record("s3", "r1", Some(90)),
        ]);
        let c = derive_covariates(&d).0.covariates.unwrap();
        assert_eq!(c[0].pref_perc, Some(50.0));
        assert_eq!(c[1].pref_perc, Some(50.0));
        assert_eq!(c[2].pref_perc, Some(0.0));
    }

    #[test]
    fn idempotent() {
        let d = ec(vec![record("s1", "r1", Some(5)), record("s2", "r1", Some(60)), record("s3", "r2", None)]);
        let once = derive_covariates(&d).0;
        let twice = derive_covariates(&once).0;
        assert_eq!(once, twice);
    }

    #[test]
    fn icml_missing_any_covariate_is_droppable() {
        let mut cfg_rec = record("s1", "r1", None);
        cfg_rec.sr_confidence = Some(3);
        cfg_rec.text_overlap = Some(0.4);
        cfg_rec.bid = Some(4);
        let mut missing = cfg_rec.clone();
        missing.submission_id = "s2".into();
        missing.text_overlap = None;
        let mut d = ec(vec![cfg_rec, missing]);
        d.config = VenueConfig::icml_like();
        let c = derive_covariates(&d).0.covariates.unwrap();
        assert_eq!(c[0].covariate_vector, Some(vec![2.0, 3.0, 0.4, 4.0, 0.0]));
        assert!(c[1].droppable());
    }
}
