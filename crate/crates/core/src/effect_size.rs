//! Ranking movement caused by a one-point score increase.
//!
//! Submissions are ranked by mean score, best first. Ties are resolved in
//! expectation (midranks), which equals the mean rank under uniformly
//! random tie-breaking. For every review, the submission's expected rank is
//! recomputed after raising that review by one point.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::ReviewDataset;
use crate::error::{Error, Result};
use crate::ids::{ReviewerId, SubmissionId};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Averaging {
    /// Mean over every (submission, reviewer) pair.
    #[default]
    AllPairs,
    /// Mean over submissions of the per-submission mean.
    PerSubmission,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EffectSizeOptions {
    /// A score already at the scale maximum stays there.
    pub capped: bool,
    pub averaging: Averaging,
}

impl Default for EffectSizeOptions {
    fn default() -> Self {
        Self {
            capped: true,
            averaging: Averaging::AllPairs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairImprovement {
    pub submission_id: SubmissionId,
    pub reviewer_id: ReviewerId,
    pub rank_before: f64,
    pub rank_after: f64,
    /// Rank gain as a percent of the number of submissions.
    pub improvement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingOutcome {
    pub per_pair: Vec<PairImprovement>,
    pub average_improvement: f64,
    pub n_submissions: usize,
    pub options: EffectSizeOptions,
}

/// Mean score held exactly as sum / count.
#[derive(Debug, Clone, Copy)]
struct Mean {
    sum: i64,
    count: i64,
}

impl Mean {
    fn cmp(&self, other: &Mean) -> Ordering {
        (i128::from(self.sum) * i128::from(other.count)).cmp(&(i128::from(other.sum) * i128::from(self.count)))
    }
}

/// Expected rank of `m` among `sorted` (ascending) with `m` itself counted
/// once: 1 + #greater + #equal/2, where `sorted` excludes `m`.
fn expected_rank(sorted: &[Mean], m: &Mean) -> f64 {
    let below_or_equal = sorted.partition_point(|x| x.cmp(m) != Ordering::Greater);
    let below = sorted.partition_point(|x| x.cmp(m) == Ordering::Less);
    let greater = sorted.len() - below_or_equal;
    let equal = below_or_equal - below;
    1.0 + greater as f64 + equal as f64 / 2.0
}

pub fn rank_improvement(dataset: &ReviewDataset, options: EffectSizeOptions) -> Result<RankingOutcome> {
    let active: Vec<&SubmissionId> = dataset
        .submissions
        .iter()
        .filter(|s| !s.withdrawn)
        .map(|s| &s.id)
        .collect();
    if active.is_empty() {
        return Err(Error::NoData("no submissions to rank".into()));
    }
    let mut means: BTreeMap<&SubmissionId, Mean> = active.iter().map(|s| (*s, Mean { sum: 0, count: 0 })).collect();
    let mut reviews = Vec::new();
    for rec in &dataset.reviews {
        if let Some(m) = means.get_mut(&rec.submission_id) {
            m.sum += i64::from(rec.score);
            m.count += 1;
            reviews.push(rec);
        }
    }
    if let Some((id, _)) = means.iter().find(|(_, m)| m.count == 0) {
        return Err(Error::Validation(format!("submission {id} has no reviews")));
    }
    let mut sorted: Vec<Mean> = means.values().copied().collect();
    sorted.sort_by(Mean::cmp);
    let n = active.len();
    let score_max = dataset.config.score_max;

    let mut per_pair: Vec<PairImprovement> = reviews
        .par_iter()
        .map(|rec| {
            let old = means[&rec.submission_id];
            // Remove one copy of the old mean to get the other submissions.
            let at = sorted.partition_point(|x| x.cmp(&old) == Ordering::Less);
            let mut others = sorted.clone();
            others.remove(at);
            let bump = if options.capped && rec.score >= score_max { 0 } else { 1 };
            let new = Mean {
                sum: old.sum + bump,
                count: old.count,
            };
            let rank_before = expected_rank(&others, &old);
            let rank_after = expected_rank(&others, &new);
            PairImprovement {
                submission_id: rec.submission_id.clone(),
                reviewer_id: rec.reviewer_id.clone(),
                rank_before,
                rank_after,
                improvement: 100.0 * (rank_before - rank_after) / n as f64,
            }
        })
        .collect();
    per_pair.sort_by(|a, b| (&a.submission_id, &a.reviewer_id).cmp(&(&b.submission_id, &b.reviewer_id)));

    let average_improvement = match options.averaging {
        Averaging::AllPairs => per_pair.iter().map(|p| p.improvement).sum::<f64>() / per_pair.len().max(1) as f64,
        Averaging::PerSubmission => {
            let mut by_sub: BTreeMap<&SubmissionId, (f64, usize)> = BTreeMap::new();
            for p in &per_pair {
                let e = by_sub.entry(&p.submission_id).or_default();
                e.0 += p.improvement;
                e.1 += 1;
            }
            by_sub.values().map(|(s, c)| s / *c as f64).sum::<f64>() / by_sub.len() as f64
        }
    };
    Ok(RankingOutcome {
        per_pair,
        average_improvement,
        n_submissions: n,
        options,
    })
}

pub fn write_improvements_csv<W: Write>(w: W, outcome: &RankingOutcome) -> Result<()> {
    let err = |e: csv::Error| Error::InvalidArgument(format!("writing effect-size csv: {e}"));
    let mut wtr = csv::Writer::from_writer(w);
    for p in &outcome.per_pair {
        wtr.serialize(p).map_err(err)?;
    }
    wtr.flush()
        .map_err(|e| Error::InvalidArgument(format!("writing effect-size csv: {e}")))
}
