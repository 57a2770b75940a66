//! Analysis-eligible data: eligibility, missing values and exclusions.
//!
//! Steps run in a fixed order: (1) keep submissions with at least one cited
//! and one uncited review; (2) under the ICML-like policy drop pairs missing
//! any covariate, then re-check (1); (3) remove every submission carrying an
//! adjudicated exclusion on any of its reviews.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::citation::CitationRelation;
use crate::dataset::{derive_covariates, ReviewDataset, VenueConfig, VenuePolicy};
use crate::error::{Error, Result, Warning};
use crate::ids::{Pair, ReviewerId, SubmissionId};

/// One retained review, with everything the estimators need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairObservation {
    pub reviewer_id: ReviewerId,
    /// Observed score, or a latent continuous score after
    /// [`AnalysisDataset::with_scores`].
    pub score: f64,
    /// Regression covariates in the venue policy's order.
    pub covariates: Vec<f64>,
    pub sr_expertise: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sr_confidence: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text_overlap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bid: Option<i32>,
    pub seniority: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmissionGroup {
    pub submission_id: SubmissionId,
    pub cited: Vec<PairObservation>,
    pub uncited: Vec<PairObservation>,
}

impl SubmissionGroup {
    pub fn n_pairs(&self) -> usize {
        self.cited.len() + self.uncited.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisDataset {
    pub config: VenueConfig,
    /// Sorted by submission id; every group has both strata non-empty.
    pub submissions: Vec<SubmissionGroup>,
}

impl AnalysisDataset {
    pub fn n_pairs(&self) -> usize {
        self.submissions.iter().map(SubmissionGroup::n_pairs).sum()
    }

    pub fn n_reviewers(&self) -> usize {
        self.submissions
            .iter()
            .flat_map(|g| g.cited.iter().chain(&g.uncited))
            .map(|o| &o.reviewer_id)
            .collect::<BTreeSet<_>>()
            .len()
    }

    /// Replace every score by `scores[pair]`; pairs absent from the map
    /// are an error.
    pub fn with_scores(&self, scores: &BTreeMap<Pair, f64>) -> Result<Self> {
        let mut out = self.clone();
        for g in &mut out.submissions {
            for o in g.cited.iter_mut().chain(g.uncited.iter_mut()) {
                let pair = Pair::new(g.submission_id.clone(), o.reviewer_id.clone());
                o.score = *scores
                    .get(&pair)
                    .ok_or_else(|| Error::Referential(format!("no replacement score for {pair}")))?;
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub submission_id: SubmissionId,
    /// Reviewers whose flag was adjudicated valid.
    pub reviewer_ids: Vec<ReviewerId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub venue_policy: VenuePolicy,
    /// Submissions passing the first eligibility check.
    pub initially_eligible: usize,
    /// Retained submissions after every step.
    pub eligible_submissions: usize,
    /// Pairs dropped for missing covariates.
    pub dropped_missing: usize,
    pub excluded_submissions: Vec<Exclusion>,
    pub retained_pairs: usize,
    pub retained_cited_pairs: usize,
    pub retained_reviewers: usize,
    pub unresolved_ambiguous: usize,
    pub warnings: Vec<Warning>,
}

impl FilterReport {
    /// Write `exclusions.csv` (`submission_id,reviewer_id`).
    pub fn write_exclusions_csv<W: Write>(&self, w: W) -> Result<()> {
        let err = |e: csv::Error| Error::InvalidArgument(format!("writing exclusions csv: {e}"));
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["submission_id", "reviewer_id"]).map_err(err)?;
        for ex in &self.excluded_submissions {
            for r in &ex.reviewer_ids {
                wtr.write_record([ex.submission_id.as_str(), r.as_str()]).map_err(err)?;
            }
        }
        wtr.flush()
            .map_err(|e| Error::InvalidArgument(format!("writing exclusions csv: {e}")))
    }
}

struct Draft<'a> {
    id: &'a SubmissionId,
    cited: Vec<(usize, bool)>,
    uncited: Vec<(usize, bool)>,
    excluded_by: Vec<ReviewerId>,
}

impl Draft<'_> {
    fn eligible(&self) -> bool {
        !self.cited.is_empty() && !self.uncited.is_empty()
    }
}

/// Group active reviews per submission with their indicators; `bool` marks
/// records whose covariates are complete.
fn drafts<'a>(dataset: &'a ReviewDataset, relation: &CitationRelation) -> Result<Vec<Draft<'a>>> {
    let covs = dataset
        .covariates
        .as_ref()
        .expect("covariates are derived before grouping");
    let subs = dataset.submission_index();
    let mut by_sub: BTreeMap<&SubmissionId, Draft> = BTreeMap::new();
    for (i, rec) in dataset.reviews.iter().enumerate() {
        if subs[&rec.submission_id].withdrawn {
            continue;
        }
        let pair = rec.pair();
        let cited = relation
            .indicator(&pair)
            .ok_or_else(|| Error::Referential(format!("citation relation does not cover {pair}")))?;
        let d = by_sub.entry(&rec.submission_id).or_insert_with(|| Draft {
            id: &rec.submission_id,
            cited: Vec::new(),
            uncited: Vec::new(),
            excluded_by: Vec::new(),
        });
        if rec.exclusion_adjudicated {
            d.excluded_by.push(rec.reviewer_id.clone());
        }
        let entry = (i, !covs[i].droppable());
        if cited {
            d.cited.push(entry);
        } else {
            d.uncited.push(entry);
        }
    }
    Ok(by_sub.into_values().collect())
}

fn ensure_covariates(dataset: &ReviewDataset) -> (std::borrow::Cow<'_, ReviewDataset>, Vec<Warning>) {
    if dataset.covariates.is_some() {
        (std::borrow::Cow::Borrowed(dataset), Vec::new())
    } else {
        let (d, w) = derive_covariates(dataset);
        (std::borrow::Cow::Owned(d), w)
    }
}

pub fn filter(dataset: &ReviewDataset, relation: &CitationRelation) -> Result<(AnalysisDataset, FilterReport)> {
    let (dataset, mut warnings) = ensure_covariates(dataset);
    let dataset = dataset.as_ref();
    let policy = dataset.config.venue_policy;
    let covs = dataset.covariates.as_ref().unwrap();
    let reviewers = dataset.reviewer_index();

    let unresolved = relation.unresolved().count();
    if unresolved > 0 {
        warnings.push(Warning::new(
            "citation relation",
            format!("{unresolved} ambiguous pairs without override are treated as uncited"),
        ));
    }

    let mut drafts: Vec<Draft> = drafts(dataset, relation)?.into_iter().filter(Draft::eligible).collect();
    let initially_eligible = drafts.len();

    let mut dropped_missing = 0;
    if policy == VenuePolicy::IcmlLike {
        for d in &mut drafts {
            let before = d.cited.len() + d.uncited.len();
            d.cited.retain(|(_, complete)| *complete);
            d.uncited.retain(|(_, complete)| *complete);
            dropped_missing += before - d.cited.len() - d.uncited.len();
        }
        drafts.retain(Draft::eligible);
    }

    let mut excluded = Vec::new();
    drafts.retain(|d| {
        if d.excluded_by.is_empty() {
            true
        } else {
            excluded.push(Exclusion {
                submission_id: d.id.clone(),
                reviewer_ids: d.excluded_by.clone(),
            });
            false
        }
    });

    if drafts.is_empty() {
        return Err(Error::NoData(
            "no submission has both a cited and an uncited review after filtering".into(),
        ));
    }

    let observe = |i: usize| {
        let rec = &dataset.reviews[i];
        PairObservation {
            reviewer_id: rec.reviewer_id.clone(),
            score: f64::from(rec.score),
            covariates: covs[i].covariate_vector.clone().unwrap_or_default(),
            sr_expertise: rec.sr_expertise,
            sr_confidence: rec.sr_confidence,
            text_overlap: rec.text_overlap,
            bid: rec.bid,
            seniority: reviewers[&rec.reviewer_id].seniority,
        }
    };
    let submissions: Vec<SubmissionGroup> = drafts
        .iter()
        .map(|d| SubmissionGroup {
            submission_id: d.id.clone(),
            cited: d.cited.iter().map(|(i, _)| observe(*i)).collect(),
            uncited: d.uncited.iter().map(|(i, _)| observe(*i)).collect(),
        })
        .collect();

    if policy == VenuePolicy::IcmlLike {
        warnings.push(Warning::new(
            "parametric caveat",
            "no reviewer flag for genuinely missing citations at this venue; that share (about 5%) is unaccounted",
        ));
    }

    let analysis = AnalysisDataset {
        config: dataset.config.clone(),
        submissions,
    };
    let report = FilterReport {
        venue_policy: policy,
        initially_eligible,
        eligible_submissions: analysis.submissions.len(),
        dropped_missing,
        excluded_submissions: excluded,
        retained_pairs: analysis.n_pairs(),
        retained_cited_pairs: analysis.submissions.iter().map(|g| g.cited.len()).sum(),
        retained_reviewers: analysis.n_reviewers(),
        unresolved_ambiguous: unresolved,
        warnings,
    };
    Ok((analysis, report))
}

/// Missing-value counts among pairs of submissions passing the first
/// eligibility check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MissingnessReport {
    pub venue_policy: VenuePolicy,
    pub pairs: usize,
    pub pairs_with_missing: usize,
    pub per_variable: BTreeMap<String, usize>,
}

pub fn missingness_report(dataset: &ReviewDataset, relation: &CitationRelation) -> Result<MissingnessReport> {
    let (dataset, _) = ensure_covariates(dataset);
    let dataset = dataset.as_ref();
    let policy = dataset.config.venue_policy;
    let vars: &[&str] = match policy {
        VenuePolicy::EcLike => &["preference"],
        VenuePolicy::IcmlLike => &["sr_confidence", "text_overlap", "bid"],
    };
    let mut per_variable: BTreeMap<String, usize> = vars.iter().map(|v| ((*v).to_owned(), 0)).collect();
    let mut pairs = 0;
    let mut pairs_with_missing = 0;
    for d in drafts(dataset, relation)?.iter().filter(|d| d.eligible()) {
        for (i, _) in d.cited.iter().chain(&d.uncited) {
            let rec = &dataset.reviews[*i];
            pairs += 1;
            let missing: Vec<&str> = match policy {
                VenuePolicy::EcLike => {
                    if rec.reported_preference().is_none() {
                        vec!["preference"]
                    } else {
                        vec![]
                    }
                }
                VenuePolicy::IcmlLike => [
                    ("sr_confidence", rec.sr_confidence.is_none()),
                    ("text_overlap", rec.text_overlap.is_none()),
                    ("bid", rec.bid.is_none()),
                ]
                .into_iter()
                .filter(|(_, m)| *m)
                .map(|(v, _)| v)
                .collect(),
            };
            if !missing.is_empty() {
                pairs_with_missing += 1;
            }
            for v in missing {
                *per_variable.get_mut(v).unwrap() += 1;
            }
        }
    }
    Ok(MissingnessReport {
        venue_policy: policy,
        pairs,
        pairs_with_missing,
        per_variable,
    })
}

impl fmt::Display for MissingnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::dataset::group_thousands;
        writeln!(
            f,
            "{} out of {} (submission, reviewer) pairs have a missing variable",
            group_thousands(self.pairs_with_missing),
            group_thousands(self.pairs)
        )?;
        for (v, n) in &self.per_variable {
            writeln!(f, "  {v:<14} {}", group_thousands(*n))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{ReviewRecord, Reviewer, Submission};

    fn review(s: &str, r: &str, score: i32) -> ReviewRecord {
        ReviewRecord {
            submission_id: s.into(),
            reviewer_id: r.into(),
            score,
            sr_expertise: 3,
            sr_confidence: Some(3),
            text_overlap: Some(0.5),
            bid: Some(4),
            preference_value: None,
            missing_citation_flag: false,
            exclusion_adjudicated: false,
        }
    }

    fn icml(reviews: Vec<ReviewRecord>) -> ReviewDataset {
        let reviewers = (1..=4)
            .map(|i| Reviewer {
                id: format!("r{i}").into(),
                last_name: format!("L{i}"),
                first_name: "A".into(),
                seniority: 0,
                has_text_profile: true,
            })
            .collect();
        let submissions = (1..=3)
            .map(|i| Submission {
                id: format!("s{i}").into(),
                reference_entries: vec![],
                withdrawn: false,
            })
            .collect();
        ReviewDataset::new(VenueConfig::icml_like(), reviewers, submissions, reviews).unwrap()
    }

    fn relation(ds: &ReviewDataset, cited: &[(&str, &str)]) -> CitationRelation {
        let cited: BTreeSet<Pair> = cited.iter().map(|(s, r)| Pair::new(*s, *r)).collect();
        CitationRelation::from_indicators(ds.assigned_pairs().into_iter().map(|p| {
            let c = cited.contains(&p);
            (p, c)
        }))
    }

    #[test]
    fn eligibility_requires_both_strata() {
        let ds = icml(vec![
            review("s1", "r1", 4),
            review("s1", "r2", 5),
            review("s1", "r3", 3),
            review("s2", "r1", 3),
            review("s2", "r2", 3),
        ]);
        let rel = relation(&ds, &[("s1", "r1"), ("s1", "r2")]);
        let (a, rep) = filter(&ds, &rel).unwrap();
        assert_eq!(a.submissions.len(), 1);
        assert_eq!(a.submissions[0].submission_id.as_str(), "s1");
        assert_eq!(a.submissions[0].cited.len(), 2);
        assert_eq!(rep.retained_pairs, 3);
        assert_eq!(rep.retained_reviewers, 3);
    }

    #[test]
    fn missing_covariates_drop_pairs_then_recheck() {
        let mut only_uncited = review("s1", "r2", 3);
        only_uncited.bid = None;
        let ds = icml(vec![
            review("s1", "r1", 4),
            only_uncited,
            review("s2", "r1", 4),
            review("s2", "r2", 4),
            review("s2", "r3", 4),
        ]);
        let rel = relation(&ds, &[("s1", "r1"), ("s2", "r1")]);
        let (a, rep) = filter(&ds, &rel).unwrap();
        assert_eq!(rep.initially_eligible, 2);
        assert_eq!(rep.dropped_missing, 1);
        assert_eq!(a.submissions.len(), 1);
        assert_eq!(a.submissions[0].submission_id.as_str(), "s2");
        assert!(rep.warnings.iter().any(|w| w.context == "parametric caveat"));

        let m = missingness_report(&ds, &rel).unwrap();
        assert_eq!(m.pairs, 5);
        assert_eq!(m.pairs_with_missing, 1);
        assert_eq!(m.per_variable["bid"], 1);
    }

    #[test]
    fn exclusion_removes_whole_submission() {
        let mut flagged = review("s2", "r3", 2);
        flagged.missing_citation_flag = true;
        flagged.exclusion_adjudicated = true;
        let ds = icml(vec![
            review("s1", "r1", 4),
            review("s1", "r2", 3),
            review("s2", "r1", 4),
            review("s2", "r2", 3),
            flagged,
        ]);
        let rel = relation(&ds, &[("s1", "r1"), ("s2", "r1")]);
        let (a, rep) = filter(&ds, &rel).unwrap();
        assert_eq!(a.submissions.len(), 1);
        assert_eq!(rep.excluded_submissions.len(), 1);
        assert_eq!(rep.excluded_submissions[0].submission_id.as_str(), "s2");
        let mut buf = Vec::new();
        rep.write_exclusions_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "submission_id,reviewer_id\ns2,r3\n");
    }

    #[test]
    fn empty_result_is_an_error() {
        let ds = icml(vec![review("s1", "r1", 4), review("s1", "r2", 3)]);
        let rel = relation(&ds, &[]);
        assert!(matches!(filter(&ds, &rel), Err(Error::NoData(_))));
    }

    #[test]
    fn complete_data_has_no_missingness() {
        let ds = icml(vec![review("s1", "r1", 4), review("s1", "r2", 3)]);
        let rel = relation(&ds, &[("s1", "r1")]);
        let m = missingness_report(&ds, &rel).unwrap();
        assert_eq!(m.pairs_with_missing, 0);
        assert!(m.per_variable.values().all(|&n| n == 0));
    }

    #[test]
    fn latent_scores_replace_observed() {
        let ds = icml(vec![review("s1", "r1", 4), review("s1", "r2", 3)]);
        let rel = relation(&ds, &[("s1", "r1")]);
        let (a, _) = filter(&ds, &rel).unwrap();
        let scores = BTreeMap::from([(Pair::new("s1", "r1"), 4.25), (Pair::new("s1", "r2"), 2.5)]);
        let b = a.with_scores(&scores).unwrap();
        assert_eq!(b.submissions[0].cited[0].score, 4.25);
        assert!(a.with_scores(&BTreeMap::new()).is_err());
    }

    #[test]
    fn missingness_rendering() {
        let icml = MissingnessReport {
            venue_policy: VenuePolicy::IcmlLike,
            pairs: 3335,
            pairs_with_missing: 578,
            per_variable: [("bid", 159), ("sr_confidence", 0), ("text_overlap", 439)]
                .into_iter()
                .map(|(k, v)| (k.to_owned(), v))
                .collect(),
        };
        let text = icml.to_string();
        assert!(text.starts_with("578 out of 3,335 (submission, reviewer) pairs"));
        assert!(text.contains("text_overlap   439") && text.contains("bid            159"));
        let ec = MissingnessReport {
            venue_policy: VenuePolicy::EcLike,
            pairs: 849,
            pairs_with_missing: 154,
            per_variable: [("preference".to_owned(), 154)].into_iter().collect(),
        };
        assert!(ec.to_string().starts_with("154 out of 849 "));
    }
}
