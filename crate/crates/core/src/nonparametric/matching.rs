use serde::{Deserialize, Serialize};

use super::MatchedTriple;
use crate::filter::{AnalysisDataset, PairObservation, SubmissionGroup};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchCriteria {
    /// Largest admissible text-overlap difference.
    pub overlap_tolerance: f64,
}

impl Default for MatchCriteria {
    fn default() -> Self {
        Self { overlap_tolerance: 0.1 }
    }
}

fn bid_class(bid: i32) -> Option<u8> {
    match bid {
        3 => Some(0),
        4 | 5 => Some(1),
        _ => None,
    }
}

/// Equal expertise, confidence and seniority; overlap within tolerance;
/// bids both 3 or both in {4, 5}. Any missing covariate fails.
pub fn compatible(a: &PairObservation, b: &PairObservation, criteria: &MatchCriteria) -> bool {
    let overlap_ok = match (a.text_overlap, b.text_overlap) {
        // Overlaps are stored with two decimals; the slack absorbs their
        // binary representation.
        (Some(x), Some(y)) => (x - y).abs() <= criteria.overlap_tolerance + 1e-9,
        _ => false,
    };
    let bids_ok = match (a.bid.and_then(bid_class), b.bid.and_then(bid_class)) {
        (Some(x), Some(y)) => x == y,
        _ => false,
    };
    a.sr_expertise == b.sr_expertise
        && a.sr_confidence.is_some()
        && a.sr_confidence == b.sr_confidence
        && overlap_ok
        && bids_ok
        && a.seniority == b.seniority
}

/// Kuhn's augmenting-path matching on `adj` (left → right), skipping
/// blocked vertices.
fn matching_size(adj: &[Vec<usize>], n_right: usize, left_blocked: &[bool], right_blocked: &[bool]) -> usize {
    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>], blocked: &[bool]) -> bool {
        for &v in &adj[u] {
            if blocked[v] || seen[v] {
                continue;
            }
            seen[v] = true;
            if owner[v].is_none_or(|w| augment(w, adj, seen, owner, blocked)) {
                owner[v] = Some(u);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; n_right];
    let mut size = 0;
    for u in 0..adj.len() {
        if left_blocked[u] {
            continue;
        }
        let mut seen = vec![false; n_right];
        if augment(u, adj, &mut seen, &mut owner, right_blocked) {
            size += 1;
        }
    }
    size
}

pub fn maximum_matching_size(adj: &[Vec<usize>], n_right: usize) -> usize {
    matching_size(adj, n_right, &vec![false; adj.len()], &vec![false; n_right])
}

/// Maximum matching for one submission. Among maximum matchings the
/// lexicographically smallest (cited id, uncited id) sequence wins.
fn match_group(group: &SubmissionGroup, criteria: &MatchCriteria) -> Vec<MatchedTriple> {
    let mut cited: Vec<&PairObservation> = group.cited.iter().collect();
    let mut uncited: Vec<&PairObservation> = group.uncited.iter().collect();
    cited.sort_by(|a, b| a.reviewer_id.cmp(&b.reviewer_id));
    uncited.sort_by(|a, b| a.reviewer_id.cmp(&b.reviewer_id));
    let adj: Vec<Vec<usize>> = cited
        .iter()
        .map(|c| (0..uncited.len()).filter(|&j| compatible(c, uncited[j], criteria)).collect())
        .collect();
    let target = maximum_matching_size(&adj, uncited.len());
    let mut left_blocked = vec![false; cited.len()];
    let mut right_blocked = vec![false; uncited.len()];
    let mut out = Vec::new();
    for i in 0..cited.len() {
        if out.len() == target {
            break;
        }
        left_blocked[i] = true;
        let mut chosen = None;
        for &j in &adj[i] {
            if right_blocked[j] {
                continue;
            }
            right_blocked[j] = true;
            if out.len() + 1 + matching_size(&adj, uncited.len(), &left_blocked, &right_blocked) == target {
                chosen = Some(j);
                break;
            }
            right_blocked[j] = false;
        }
        if let Some(j) = chosen {
            out.push(MatchedTriple {
                submission_id: group.submission_id.clone(),
                cited_reviewer_id: cited[i].reviewer_id.clone(),
                uncited_reviewer_id: uncited[j].reviewer_id.clone(),
                score_cited: cited[i].score,
                score_uncited: uncited[j].score,
            });
        }
    }
    out
}

/// Triples from every submission, in submission order.
pub fn match_triples(data: &AnalysisDataset, criteria: &MatchCriteria) -> Vec<MatchedTriple> {
    data.submissions.iter().flat_map(|g| match_group(g, criteria)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::VenueConfig;

    fn obs(id: &str, exp: i32, conf: i32, overlap: f64, bid: i32, seniority: u8) -> PairObservation {
        PairObservation {
            reviewer_id: id.into(),
            score: 4.0,
            covariates: vec![],
            sr_expertise: exp,
            sr_confidence: Some(conf),
            text_overlap: Some(overlap),
            bid: Some(bid),
            seniority,
        }
    }

    #[test]
    fn criteria_examples() {
        let c = MatchCriteria::default();
        let a = obs("a", 3, 4, 0.55, 4, 1);
        assert!(compatible(&a, &obs("b", 3, 4, 0.50, 5, 1), &c));
        assert!(compatible(&a, &obs("b", 3, 4, 0.45, 4, 1), &c));
        assert!(!compatible(&obs("a", 3, 4, 0.5, 3, 1), &obs("b", 3, 4, 0.5, 4, 1), &c));
        assert!(!compatible(&a, &obs("b", 2, 4, 0.55, 4, 1), &c));
        assert!(!compatible(&a, &obs("b", 3, 3, 0.55, 4, 1), &c));
        assert!(!compatible(&a, &obs("b", 3, 4, 0.70, 4, 1), &c));
        assert!(!compatible(&a, &obs("b", 3, 4, 0.55, 4, 0), &c));
        let mut missing = obs("b", 3, 4, 0.55, 4, 1);
        missing.text_overlap = None;
        assert!(!compatible(&a, &missing, &c));
    }

    #[test]
    fn greedy_would_lose_a_pair() {
        // c1 fits u1 and u2, c2 fits only u1; maximum matching uses both.
        let group = SubmissionGroup {
            submission_id: "s".into(),
            cited: vec![obs("c1", 3, 3, 0.5, 4, 0), obs("c2", 3, 3, 0.3, 4, 0)],
            uncited: vec![obs("u1", 3, 3, 0.4, 4, 0), obs("u2", 3, 3, 0.6, 5, 0)],
        };
        let data = AnalysisDataset {
            config: VenueConfig::icml_like(),
            submissions: vec![group],
        };
        let t = match_triples(&data, &MatchCriteria::default());
        let got: Vec<_> = t
            .iter()
            .map(|t| (t.cited_reviewer_id.as_str(), t.uncited_reviewer_id.as_str()))
            .collect();
        assert_eq!(got, vec![("c1", "u2"), ("c2", "u1")]);
    }

    #[test]
    fn ties_prefer_earlier_ids() {
        let group = SubmissionGroup {
            submission_id: "s".into(),
            cited: vec![obs("c1", 2, 2, 0.5, 3, 0)],
            uncited: vec![obs("u2", 2, 2, 0.5, 3, 0), obs("u1", 2, 2, 0.5, 3, 0)],
        };
        let data = AnalysisDataset {
            config: VenueConfig::icml_like(),
            submissions: vec![group],
        };
        let t = match_triples(&data, &MatchCriteria::default());
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].uncited_reviewer_id.as_str(), "u1");
    }
}
