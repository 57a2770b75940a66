//! Matched-pair test: cited and uncited reviewers of the same submission
//! are paired when they agree on every covariate, and the mean score
//! difference over pairs is tested by random sign flips.

mod matching;

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::{ReviewerId, SubmissionId};
use crate::parametric::Interval;

pub use matching::{compatible, match_triples, maximum_matching_size, MatchCriteria};

pub const DEFAULT_ITERATIONS: usize = 10_000;

/// Largest K accepted by [`exact_permutation_p`].
pub const MAX_EXACT_K: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchedTriple {
    pub submission_id: SubmissionId,
    pub cited_reviewer_id: ReviewerId,
    pub uncited_reviewer_id: ReviewerId,
    pub score_cited: f64,
    pub score_uncited: f64,
}

impl MatchedTriple {
    pub fn difference(&self) -> f64 {
        self.score_cited - self.score_uncited
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationResult {
    pub tau: f64,
    pub k: usize,
    pub p_two_sided: f64,
    /// Absent when K < 2.
    pub ci95_bootstrap: Option<Interval>,
    /// 0 when the p-value comes from full enumeration.
    pub iterations: usize,
    pub exact: bool,
}

/// Sub-generator for iteration `index` of a seeded procedure. Streams are
/// disjoint, so serial and parallel runs draw the same numbers.
fn iteration_rng(seed: u64, domain: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((domain << 56) | index as u64);
    rng
}

const PERMUTATION_DOMAIN: u64 = 1;
const BOOTSTRAP_DOMAIN: u64 = 2;

fn differences(triples: &[MatchedTriple]) -> Vec<f64> {
    triples.iter().map(MatchedTriple::difference).collect()
}

/// `|a| ≥ |b|` up to summation rounding.
fn at_least_as_extreme(a: f64, b: f64) -> bool {
    a.abs() >= b.abs() - 1e-9 * (1.0 + b.abs())
}

pub fn tau(triples: &[MatchedTriple]) -> Result<f64> {
    if triples.is_empty() {
        return Err(Error::NoData("no matched triples".into()));
    }
    Ok(differences(triples).iter().sum::<f64>() / triples.len() as f64)
}

/// Monte Carlo sign-flip test with p = (1 + #{|τ_b| ≥ |τ|}) / (1 + B).
pub fn permutation_test(triples: &[MatchedTriple], iterations: usize, seed: u64) -> Result<PermutationResult> {
    let t = tau(triples)?;
    if iterations == 0 {
        return Err(Error::InvalidArgument("iterations must be positive".into()));
    }
    let d = differences(triples);
    let observed: f64 = d.iter().sum();
    let extreme = (0..iterations)
        .into_par_iter()
        .filter(|&b| {
            let mut rng = iteration_rng(seed, PERMUTATION_DOMAIN, b);
            let s: f64 = d.iter().map(|x| if rng.random::<bool>() { *x } else { -*x }).sum();
            at_least_as_extreme(s, observed)
        })
        .count();
    Ok(PermutationResult {
        tau: t,
        k: triples.len(),
        p_two_sided: (1 + extreme) as f64 / (1 + iterations) as f64,
        ci95_bootstrap: None,
        iterations,
        exact: false,
    })
}

/// Two-sided p over all 2^K sign patterns (the identity included).
pub fn exact_permutation_p(triples: &[MatchedTriple]) -> Result<f64> {
    tau(triples)?;
    let k = triples.len();
    if k > MAX_EXACT_K {
        return Err(Error::InvalidArgument(format!(
            "exact enumeration supports K ≤ {MAX_EXACT_K}, got {k}"
        )));
    }
    let d = differences(triples);
    let observed: f64 = d.iter().sum();
    let total = 1u64 << k;
    let extreme = (0..total)
        .into_par_iter()
        .filter(|mask| {
            let s: f64 = d
                .iter()
                .enumerate()
                .map(|(i, x)| if mask >> i & 1 == 1 { -*x } else { *x })
                .sum();
            at_least_as_extreme(s, observed)
        })
        .count();
    Ok(extreme as f64 / total as f64)
}

/// Sample quantile, linear interpolation between order statistics.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Percentile 95% interval of τ over resamples of triples.
pub fn bootstrap_ci(triples: &[MatchedTriple], iterations: usize, seed: u64) -> Result<Interval> {
    let k = triples.len();
    if k < 2 {
        return Err(Error::SampleSize { n: k, params: 2 });
    }
    if iterations == 0 {
        return Err(Error::InvalidArgument("iterations must be positive".into()));
    }
    let d = differences(triples);
    let mut taus: Vec<f64> = (0..iterations)
        .into_par_iter()
        .map(|b| {
            let mut rng = iteration_rng(seed, BOOTSTRAP_DOMAIN, b);
            (0..k).map(|_| d[rng.random_range(0..k)]).sum::<f64>() / k as f64
        })
        .collect();
    taus.sort_by(f64::total_cmp);
    Ok(Interval {
        lo: quantile(&taus, 0.025),
        hi: quantile(&taus, 0.975),
    })
}

/// τ, its p-value and a bootstrap interval in one call. `exact` switches
/// the p-value to full enumeration.
pub fn analyze(triples: &[MatchedTriple], iterations: usize, seed: u64, exact: bool) -> Result<PermutationResult> {
    let mut result = if exact {
        PermutationResult {
            tau: tau(triples)?,
            k: triples.len(),
            p_two_sided: exact_permutation_p(triples)?,
            ci95_bootstrap: None,
            iterations: 0,
            exact: true,
        }
    } else {
        permutation_test(triples, iterations, seed)?
    };
    if triples.len() >= 2 {
        result.ci95_bootstrap = Some(bootstrap_ci(triples, iterations.max(1), seed)?);
    }
    Ok(result)
}

pub fn write_triples_csv<W: Write>(w: W, triples: &[MatchedTriple]) -> Result<()> {
    let err = |e: csv::Error| Error::InvalidArgument(format!("writing triples csv: {e}"));
    let mut wtr = csv::Writer::from_writer(w);
    for t in triples {
        wtr.serialize(t).map_err(err)?;
    }
    wtr.flush()
        .map_err(|e| Error::InvalidArgument(format!("writing triples csv: {e}")))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn triples(diffs: &[f64]) -> Vec<MatchedTriple> {
        diffs
            .iter()
            .enumerate()
            .map(|(i, d)| MatchedTriple {
                submission_id: format!("s{i}").into(),
                cited_reviewer_id: "c".into(),
                uncited_reviewer_id: "u".into(),
                score_cited: 3.0 + d,
                score_uncited: 3.0,
            })
            .collect()
    }

    #[test]
    fn two_unit_differences() {
        let t = triples(&[1.0, 1.0]);
        assert_eq!(exact_permutation_p(&t).unwrap(), 0.5);
        let r = permutation_test(&t, 10_000, 42).unwrap();
        assert_eq!(r.tau, 1.0);
        assert!((r.p_two_sided - 0.5).abs() <= 0.02, "{}", r.p_two_sided);
    }

    #[test]
    fn all_zero_differences() {
        let t = triples(&[0.0; 5]);
        let r = permutation_test(&t, 500, 1).unwrap();
        assert_eq!((r.tau, r.p_two_sided), (0.0, 1.0));
        assert_eq!(exact_permutation_p(&t).unwrap(), 1.0);
    }

    #[test]
    fn constant_differences_give_degenerate_interval() {
        let ci = bootstrap_ci(&triples(&[0.5; 7]), 1000, 3).unwrap();
        assert_eq!((ci.lo, ci.hi), (0.5, 0.5));
    }

    #[test]
    fn errors_on_small_k() {
        assert!(matches!(permutation_test(&[], 10, 0), Err(Error::NoData(_))));
        assert!(bootstrap_ci(&triples(&[1.0]), 10, 0).is_err());
        let r = analyze(&triples(&[1.0]), 100, 0, false).unwrap();
        assert!(r.ci95_bootstrap.is_none());
    }

    #[test]
    fn deterministic_given_seed() {
        let t = triples(&[1.0, -2.0, 0.0, 1.0, 3.0, 1.0]);
        assert_eq!(analyze(&t, 2000, 9, false).unwrap(), analyze(&t, 2000, 9, false).unwrap());
        assert_ne!(
            permutation_test(&t, 2000, 9).unwrap().p_two_sided,
            permutation_test(&t, 2000, 10).unwrap().p_two_sided
        );
    }

    #[test]
    fn quantile_interpolates() {
        assert_eq!(quantile(&[0.0, 10.0], 0.25), 2.5);
        assert_eq!(quantile(&[1.0, 2.0, 3.0], 0.5), 2.0);
    }

    #[test]
    fn csv_layout() {
        let mut out = Vec::new();
        write_triples_csv(&mut out, &triples(&[1.0])).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "submission_id,cited_reviewer_id,uncited_reviewer_id,score_cited,score_uncited\ns0,c,u,4.0,3.0\n"
        );
    }
}
