//! Paper–reviewer assignment maximizing similarity plus a bonus per cited
//! reviewer.
//!
//! The problem is solved exactly as an integral min-cost flow
//! (source → paper, capacity k; paper → reviewer, capacity 1;
//! reviewer → sink, capacity L). Similarities and λ are scaled to integer
//! micro-units with round-half-even, so optimality is decided in exact
//! arithmetic.

mod flow;
mod io;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::citation::CitationRelation;
use crate::error::{Error, Result};
use crate::ids::{Pair, ReviewerId, SubmissionId};
use flow::MinCostFlow;

pub use io::{
    parse_edits, parse_preferences, parse_similarity, write_assignment_csv, write_sweep_csv, Edit,
    EditAction, PreferenceRow,
};

/// Integer units per unit of similarity.
pub const SCALE: f64 = 1e6;

/// Similarity reduction applied to pairs whose preference is missing.
pub const DEFAULT_MISSING_PENALTY: f64 = 0.05;

pub(crate) fn to_units(x: f64) -> i128 {
    (x * SCALE).round_ties_even() as i128
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    pub sim: BTreeMap<Pair, f64>,
    pub forbidden: BTreeSet<Pair>,
}

impl SimilarityMatrix {
    pub fn new(sim: BTreeMap<Pair, f64>, forbidden: BTreeSet<Pair>) -> Result<Self> {
        let m = Self { sim, forbidden };
        m.validate()?;
        Ok(m)
    }

    pub fn papers(&self) -> BTreeSet<&SubmissionId> {
        self.sim
            .keys()
            .chain(&self.forbidden)
            .map(|p| &p.submission_id)
            .collect()
    }

    pub fn reviewers(&self) -> BTreeSet<&ReviewerId> {
        self.sim
            .keys()
            .chain(&self.forbidden)
            .map(|p| &p.reviewer_id)
            .collect()
    }

    /// Every paper × reviewer combination must carry a similarity in [0, 1]
    /// or be forbidden.
    pub fn validate(&self) -> Result<()> {
        for (p, &s) in &self.sim {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::Validation(format!("similarity of {p} is {s}, outside [0, 1]")));
            }
        }
        let reviewers = self.reviewers();
        for paper in self.papers() {
            for r in &reviewers {
                let pair = Pair::new(paper.clone(), (*r).clone());
                if !self.sim.contains_key(&pair) && !self.forbidden.contains(&pair) {
                    return Err(Error::Validation(format!("no similarity for {pair}")));
                }
            }
        }
        Ok(())
    }

    pub fn is_allowed(&self, pair: &Pair) -> bool {
        self.sim.contains_key(pair) && !self.forbidden.contains(pair)
    }

    /// Apply reported bids or preferences: unwilling pairs become forbidden,
    /// pairs without a reported value lose `missing_penalty` similarity
    /// (floored at 0). A pair absent from `rows` counts as missing.
    pub fn apply_preferences(
        &mut self,
        rows: &[PreferenceRow],
        policy: crate::dataset::VenuePolicy,
        missing_penalty: f64,
    ) {
        use crate::dataset::VenuePolicy;
        let mut reported: BTreeMap<&Pair, Option<i32>> = BTreeMap::new();
        for row in rows {
            reported.insert(&row.pair, row.value);
        }
        let mut forbid = Vec::new();
        for (pair, s) in self.sim.iter_mut() {
            let value = reported.get(pair).copied().flatten();
            let value = match policy {
                // 0 is the EC-like "not entered" sentinel.
                VenuePolicy::EcLike => value.filter(|&v| v != 0),
                VenuePolicy::IcmlLike => value,
            };
            match value {
                None => *s = (*s - missing_penalty).max(0.0),
                Some(v) => {
                    let unwilling = match policy {
                        VenuePolicy::EcLike => v < 0,
                        VenuePolicy::IcmlLike => v <= 2,
                    };
                    if unwilling {
                        forbid.push(pair.clone());
                    }
                }
            }
        }
        self.forbidden.extend(forbid);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssignmentSpec {
    /// Reviewers per paper (k).
    pub paper_load: usize,
    /// Maximum papers per reviewer (L).
    pub reviewer_cap: usize,
    pub lambda: f64,
}

impl AssignmentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.paper_load == 0 {
            return Err(Error::InvalidArgument("paper_load must be at least 1".into()));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "lambda must be finite and non-negative, got {}",
                self.lambda
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub pairs: BTreeSet<Pair>,
    /// Σ similarity over the assigned pairs.
    pub objective_quality: f64,
    pub cited_count: usize,
}

impl Assignment {
    fn from_pairs(pairs: BTreeSet<Pair>, sim: &SimilarityMatrix, relation: &CitationRelation) -> Self {
        let units: i128 = pairs.iter().map(|p| to_units(sim.sim[p])).sum();
        let cited_count = pairs.iter().filter(|p| relation.is_cited(p)).count();
        Self {
            pairs,
            objective_quality: units as f64 / SCALE,
            cited_count,
        }
    }

    /// Number of distinct papers with at least one cited reviewer.
    pub fn papers_with_cited(&self, relation: &CitationRelation) -> usize {
        self.pairs
            .iter()
            .filter(|p| relation.is_cited(p))
            .map(|p| &p.submission_id)
            .collect::<BTreeSet<_>>()
            .len()
    }

    /// Check load caps and forbidden pairs.
    pub fn validate(&self, sim: &SimilarityMatrix, spec: &AssignmentSpec) -> Result<()> {
        let mut per_paper: BTreeMap<&SubmissionId, usize> =
            sim.papers().into_iter().map(|p| (p, 0)).collect();
        let mut per_reviewer: BTreeMap<&ReviewerId, usize> = BTreeMap::new();
        for p in &self.pairs {
            if !sim.is_allowed(p) {
                return Err(Error::Override {
                    submission_id: p.submission_id.to_string(),
                    reviewer_id: p.reviewer_id.to_string(),
                    reason: "pair is forbidden or has no similarity".into(),
                });
            }
            *per_paper.entry(&p.submission_id).or_default() += 1;
            *per_reviewer.entry(&p.reviewer_id).or_default() += 1;
        }
        for (paper, n) in per_paper {
            if n != spec.paper_load {
                return Err(Error::Validation(format!(
                    "paper {paper} has {n} reviewers, paper_load requires {}",
                    spec.paper_load
                )));
            }
        }
        for (r, n) in per_reviewer {
            if n > spec.reviewer_cap {
                return Err(Error::Validation(format!(
                    "reviewer {r} has {n} papers, reviewer_cap is {}",
                    spec.reviewer_cap
                )));
            }
        }
        Ok(())
    }
}

fn check_feasibility(
    papers: &[&SubmissionId],
    reviewers: &[&ReviewerId],
    sim: &SimilarityMatrix,
    spec: &AssignmentSpec,
) -> Result<()> {
    for paper in papers {
        let eligible = reviewers
            .iter()
            .filter(|r| sim.is_allowed(&Pair::new((*paper).clone(), (**r).clone())))
            .count();
        if eligible < spec.paper_load {
            return Err(Error::Infeasible(format!(
                "paper_load: paper {paper} has {eligible} non-forbidden reviewers but needs {}",
                spec.paper_load
            )));
        }
    }
    let demand = spec.paper_load * papers.len();
    let supply = spec.reviewer_cap * reviewers.len();
    if demand > supply {
        return Err(Error::Infeasible(format!(
            "reviewer_cap: {} papers × paper_load {} = {demand} slots exceed {} reviewers × reviewer_cap {} = {supply}",
            papers.len(),
            spec.paper_load,
            reviewers.len(),
            spec.reviewer_cap
        )));
    }
    Ok(())
}

/// Exact maximizer of Σ sim + λ·Σ cited subject to the load constraints.
///
/// Among optimal assignments the one whose pairs are lexicographically
/// earliest (by rank-weighted preference) is returned.
pub fn solve(sim: &SimilarityMatrix, relation: &CitationRelation, spec: &AssignmentSpec) -> Result<Assignment> {
    spec.validate()?;
    sim.validate()?;
    let papers: Vec<&SubmissionId> = sim.papers().into_iter().collect();
    let reviewers: Vec<&ReviewerId> = sim.reviewers().into_iter().collect();
    if papers.is_empty() {
        return Ok(Assignment {
            pairs: BTreeSet::new(),
            objective_quality: 0.0,
            cited_count: 0,
        });
    }
    check_feasibility(&papers, &reviewers, sim, spec)?;

    let allowed: Vec<&Pair> = sim.sim.keys().filter(|p| !sim.forbidden.contains(p)).collect();
    // Perturbation: earlier pairs (in sorted order) get larger bonuses; the
    // whole bonus budget stays below one unit of the scaled objective.
    let n = allowed.len() as i128;
    let tie_scale = n * (n + 1) / 2 + 1;
    let lambda_units = to_units(spec.lambda);
    let weights: Vec<i128> = allowed
        .iter()
        .enumerate()
        .map(|(rank, p)| {
            let base = to_units(sim.sim[*p]) + if relation.is_cited(p) { lambda_units } else { 0 };
            base * tie_scale + (n - rank as i128)
        })
        .collect();
    let top = weights.iter().copied().max().unwrap_or(0);

    let paper_idx: BTreeMap<&SubmissionId, usize> = papers.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let reviewer_idx: BTreeMap<&ReviewerId, usize> =
        reviewers.iter().enumerate().map(|(i, r)| (*r, i)).collect();
    let source = 0;
    let sink = 1;
    let paper_node = |i: usize| 2 + i;
    let reviewer_node = |j: usize| 2 + papers.len() + j;
    let mut g = MinCostFlow::new(2 + papers.len() + reviewers.len());
    let cap = |x: usize| i64::try_from(x).unwrap_or(i64::MAX);
    for i in 0..papers.len() {
        g.add_edge(source, paper_node(i), cap(spec.paper_load), 0);
    }
    for j in 0..reviewers.len() {
        g.add_edge(reviewer_node(j), sink, cap(spec.reviewer_cap), 0);
    }
    // Every unit of flow uses exactly one paper→reviewer arc, so `top − w`
    // is a non-negative cost with the same minimizer as −w.
    let handles: Vec<_> = allowed
        .iter()
        .zip(&weights)
        .map(|(p, w)| {
            g.add_edge(
                paper_node(paper_idx[&p.submission_id]),
                reviewer_node(reviewer_idx[&p.reviewer_id]),
                1,
                top - w,
            )
        })
        .collect();
    let demand = cap(spec.paper_load * papers.len());
    let (flow, _) = g.run(source, sink, demand);
    if flow < demand {
        return Err(Error::Infeasible(format!(
            "paper_load/reviewer_cap: only {flow} of {demand} slots can be filled under reviewer_cap {} once forbidden pairs are removed",
            spec.reviewer_cap
        )));
    }
    let pairs: BTreeSet<Pair> = allowed
        .iter()
        .zip(&handles)
        .filter(|(_, h)| g.flow_on(**h) > 0)
        .map(|(p, _)| (*p).clone())
        .collect();
    Ok(Assignment::from_pairs(pairs, sim, relation))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub lambda: f64,
    pub objective_quality: f64,
    pub cited_count: usize,
    pub papers_with_cited: usize,
}

/// One exact solve per λ, run in parallel; output follows `lambdas` order.
pub fn tradeoff_sweep(
    sim: &SimilarityMatrix,
    relation: &CitationRelation,
    spec: &AssignmentSpec,
    lambdas: &[f64],
) -> Result<Vec<SweepPoint>> {
    lambdas
        .par_iter()
        .map(|&lambda| {
            let a = solve(sim, relation, &AssignmentSpec { lambda, ..*spec })?;
            Ok(SweepPoint {
                lambda,
                objective_quality: a.objective_quality,
                cited_count: a.cited_count,
                papers_with_cited: a.papers_with_cited(relation),
            })
        })
        .collect()
}

/// Apply manual edits and re-validate the result against the constraints.
pub fn apply_edits(
    assignment: &Assignment,
    edits: &[Edit],
    sim: &SimilarityMatrix,
    relation: &CitationRelation,
    spec: &AssignmentSpec,
) -> Result<Assignment> {
    let mut pairs = assignment.pairs.clone();
    for edit in edits {
        let ok = match edit.action {
            EditAction::Add => pairs.insert(edit.pair.clone()),
            EditAction::Remove => pairs.remove(&edit.pair),
        };
        if !ok {
            let reason = match edit.action {
                EditAction::Add => "pair already assigned",
                EditAction::Remove => "pair not in assignment",
            };
            return Err(Error::Override {
                submission_id: edit.pair.submission_id.to_string(),
                reviewer_id: edit.pair.reviewer_id.to_string(),
                reason: reason.into(),
            });
        }
    }
    let out = Assignment::from_pairs(
        pairs.iter().filter(|p| sim.sim.contains_key(p)).cloned().collect(),
        sim,
        relation,
    );
    if out.pairs.len() != pairs.len() {
        let bad = pairs.iter().find(|p| !sim.sim.contains_key(p)).unwrap();
        return Err(Error::Override {
            submission_id: bad.submission_id.to_string(),
            reviewer_id: bad.reviewer_id.to_string(),
            reason: "pair has no similarity".into(),
        });
    }
    out.validate(sim, spec)?;
    Ok(out)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn matrix(rows: &[&[f64]]) -> SimilarityMatrix {
        let mut sim = BTreeMap::new();
        for (i, row) in rows.iter().enumerate() {
            for (j, &s) in row.iter().enumerate() {
                sim.insert(Pair::new(format!("p{}", i + 1), format!("r{}", j + 1)), s);
            }
        }
        SimilarityMatrix::new(sim, BTreeSet::new()).unwrap()
    }

    fn pairs(list: &[(&str, &str)]) -> BTreeSet<Pair> {
        list.iter().map(|(s, r)| Pair::new(*s, *r)).collect()
    }

    fn two_by_two() -> (SimilarityMatrix, CitationRelation) {
        let sim = matrix(&[&[0.9, 0.1], &[0.2, 0.8]]);
        let rel = CitationRelation::from_indicators(sim.sim.keys().map(|p| {
            let cited = p.submission_id.as_str() == "p1" && p.reviewer_id.as_str() == "r2";
            (p.clone(), cited)
        }));
        (sim, rel)
    }

    #[test]
    fn two_by_two_without_bonus() {
        let (sim, rel) = two_by_two();
        let spec = AssignmentSpec { paper_load: 1, reviewer_cap: 1, lambda: 0.0 };
        let a = solve(&sim, &rel, &spec).unwrap();
        assert_eq!(a.pairs, pairs(&[("p1", "r1"), ("p2", "r2")]));
        assert_eq!(a.objective_quality, 1.7);
        assert_eq!(a.cited_count, 0);
    }

    #[test]
    fn two_by_two_with_bonus() {
        let (sim, rel) = two_by_two();
        let spec = AssignmentSpec { paper_load: 1, reviewer_cap: 1, lambda: 2.0 };
        let a = solve(&sim, &rel, &spec).unwrap();
        assert_eq!(a.pairs, pairs(&[("p1", "r2"), ("p2", "r1")]));
        assert_eq!(a.objective_quality, 0.3);
        assert_eq!(a.cited_count, 1);
    }

    #[test]
    fn zero_citations_match_plain_similarity_solve() {
        let sim = matrix(&[&[0.3, 0.6, 0.2], &[0.5, 0.5, 0.9], &[0.1, 0.7, 0.4]]);
        let none = CitationRelation::from_indicators(sim.sim.keys().map(|p| (p.clone(), false)));
        let spec = AssignmentSpec { paper_load: 2, reviewer_cap: 2, lambda: 0.0 };
        let a = solve(&sim, &none, &spec).unwrap();
        let b = solve(&sim, &none, &AssignmentSpec { lambda: 5.0, ..spec }).unwrap();
        assert_eq!(a, b);
        a.validate(&sim, &spec).unwrap();
    }

    #[test]
    fn ties_break_toward_earlier_pairs() {
        let sim = matrix(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let rel = CitationRelation::default();
        let spec = AssignmentSpec { paper_load: 1, reviewer_cap: 1, lambda: 0.0 };
        let a = solve(&sim, &rel, &spec).unwrap();
        assert_eq!(a.pairs, pairs(&[("p1", "r1"), ("p2", "r2")]));
    }

    #[test]
    fn forbidden_pairs_are_avoided() {
        let mut sim = matrix(&[&[0.9, 0.1], &[0.2, 0.8]]);
        sim.forbidden.insert(Pair::new("p1", "r1"));
        let spec = AssignmentSpec { paper_load: 1, reviewer_cap: 1, lambda: 0.0 };
        let a = solve(&sim, &CitationRelation::default(), &spec).unwrap();
        assert_eq!(a.pairs, pairs(&[("p1", "r2"), ("p2", "r1")]));
    }

    #[test]
    fn infeasibility_names_the_constraint() {
        let sim = matrix(&[&[0.9, 0.1], &[0.2, 0.8], &[0.3, 0.3]]);
        let rel = CitationRelation::default();
        let err = solve(&sim, &rel, &AssignmentSpec { paper_load: 1, reviewer_cap: 1, lambda: 0.0 }).unwrap_err();
        assert!(matches!(&err, Error::Infeasible(m) if m.starts_with("reviewer_cap")), "{err}");
        let err = solve(&sim, &rel, &AssignmentSpec { paper_load: 3, reviewer_cap: 9, lambda: 0.0 }).unwrap_err();
        assert!(matches!(&err, Error::Infeasible(m) if m.starts_with("paper_load")), "{err}");

        // Globally enough slots, but two papers compete for one reviewer.
        let mut sim = matrix(&[&[0.9, 0.1], &[0.2, 0.8]]);
        sim.forbidden.insert(Pair::new("p1", "r2"));
        sim.forbidden.insert(Pair::new("p2", "r2"));
        let err = solve(&sim, &rel, &AssignmentSpec { paper_load: 1, reviewer_cap: 1, lambda: 0.0 }).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
    }

    #[test]
    fn preferences_forbid_and_penalize() {
        use crate::dataset::VenuePolicy;
        let mut sim = matrix(&[&[0.9, 0.5]]);
        let rows = vec![
            PreferenceRow { pair: Pair::new("p1", "r1"), value: Some(-10) },
            PreferenceRow { pair: Pair::new("p1", "r2"), value: Some(0) },
        ];
        sim.apply_preferences(&rows, VenuePolicy::EcLike, 0.1);
        assert!(sim.forbidden.contains(&Pair::new("p1", "r1")));
        assert!((sim.sim[&Pair::new("p1", "r2")] - 0.4).abs() < 1e-12);

        let mut sim = matrix(&[&[0.9, 0.5]]);
        let rows = vec![PreferenceRow { pair: Pair::new("p1", "r2"), value: Some(2) }];
        sim.apply_preferences(&rows, VenuePolicy::IcmlLike, 0.1);
        assert!(sim.forbidden.contains(&Pair::new("p1", "r2")));
        assert!((sim.sim[&Pair::new("p1", "r1")] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn edits_are_revalidated() {
        let (sim, rel) = two_by_two();
        let spec = AssignmentSpec { paper_load: 1, reviewer_cap: 1, lambda: 0.0 };
        let a = solve(&sim, &rel, &spec).unwrap();
        let swap = [
            Edit { action: EditAction::Remove, pair: Pair::new("p1", "r1") },
            Edit { action: EditAction::Remove, pair: Pair::new("p2", "r2") },
            Edit { action: EditAction::Add, pair: Pair::new("p1", "r2") },
            Edit { action: EditAction::Add, pair: Pair::new("p2", "r1") },
        ];
        let b = apply_edits(&a, &swap, &sim, &rel, &spec).unwrap();
        assert_eq!(b.cited_count, 1);
        let overload = [Edit { action: EditAction::Add, pair: Pair::new("p1", "r2") }];
        assert!(apply_edits(&a, &overload, &sim, &rel, &spec).is_err());
        let missing = [Edit { action: EditAction::Remove, pair: Pair::new("p9", "r1") }];
        assert!(matches!(apply_edits(&a, &missing, &sim, &rel, &spec), Err(Error::Override { .. })));
    }

    #[test]
    fn sweep_is_ordered_and_monotone() {
        let sim = matrix(&[&[0.9, 0.1, 0.4], &[0.2, 0.8, 0.3], &[0.6, 0.5, 0.7]]);
        let rel = CitationRelation::from_indicators(
            sim.sim.keys().enumerate().map(|(i, p)| (p.clone(), [1, 5, 6].contains(&i))),
        );
        let spec = AssignmentSpec { paper_load: 1, reviewer_cap: 1, lambda: 0.0 };
        let lambdas: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let sweep = tradeoff_sweep(&sim, &rel, &spec, &lambdas).unwrap();
        assert_eq!(sweep.iter().map(|p| p.lambda).collect::<Vec<_>>(), lambdas);
        for w in sweep.windows(2) {
            assert!(w[1].cited_count >= w[0].cited_count);
            assert!(w[1].objective_quality <= w[0].objective_quality);
        }
        assert_eq!(sweep.last().unwrap().cited_count, 3);
    }
}
