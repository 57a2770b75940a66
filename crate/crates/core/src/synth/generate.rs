use std::collections::{BTreeMap, HashSet};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::render::{self, render_entry, AuthorName, CitationFormat};
use crate::citation::{normalize_name, CitationRelation};
use crate::dataset::{
    covariate_names, derive_covariates, ReviewDataset, ReviewRecord, Reviewer, Submission,
    VenueConfig, VenuePolicy,
};
use crate::error::{Error, Result};
use crate::ids::{Pair, ReviewerId, SubmissionId};

/// Linear-model coefficients. Covariate coefficients are keyed by the
/// regression covariate names of the venue policy; absent names are 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub intercept: f64,
    pub quality: f64,
    #[serde(default)]
    pub covariates: BTreeMap<String, f64>,
}

impl Coefficients {
    pub fn get(&self, name: &str) -> f64 {
        self.covariates.get(name).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityDistribution {
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MissingnessRates {
    /// EC-like: preference not entered.
    pub preference: f64,
    pub confidence: f64,
    pub text_overlap: f64,
    pub bid: f64,
}

/// Distributions of the observed reviewer covariates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovariateParams {
    /// Probabilities of self-reported expertise 1..=4.
    pub expertise_probs: [f64; 4],
    /// Probability that confidence equals expertise; otherwise uniform 1..=4.
    pub confidence_agreement: f64,
    pub overlap_base: f64,
    pub overlap_per_expertise: f64,
    pub overlap_sd: f64,
    /// Probabilities of bids 3, 4, 5.
    pub bid_probs: [f64; 3],
    pub seniority_rate: f64,
    /// Per-pair probability that the reviewer flags a missing citation.
    pub missing_citation_flag_rate: f64,
    /// Fraction of flags adjudicated as valid exclusions.
    pub adjudicated_fraction: f64,
}

impl Default for CovariateParams {
    fn default() -> Self {
        Self {
            expertise_probs: [0.1, 0.3, 0.4, 0.2],
            confidence_agreement: 0.6,
            overlap_base: 0.2,
            overlap_per_expertise: 0.1,
            overlap_sd: 0.1,
            bid_probs: [0.2, 0.4, 0.4],
            seniority_rate: 0.4,
            missing_citation_flag_rate: 0.0,
            adjudicated_fraction: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub venue: VenueConfig,
    pub n_submissions: usize,
    pub n_reviewers: usize,
    pub reviewers_per_paper: usize,
    pub coefficients: Coefficients,
    /// Planted citation effect.
    pub alpha_star: f64,
    pub sigma0: f64,
    pub quality_distribution: QualityDistribution,
    /// Probability that an assigned pair is cited.
    pub citation_prevalence: f64,
    /// Latent Gaussian-copula correlation between citation and expertise.
    pub confounder_correlation: f64,
    #[serde(default)]
    pub missingness_rates: MissingnessRates,
    #[serde(default)]
    pub covariate_params: CovariateParams,
    /// Plain (non-citing) reference entries per submission.
    #[serde(default = "default_filler")]
    pub filler_references: usize,
    /// Skip rendering reference lists (faster when the relation is used directly).
    #[serde(default)]
    pub skip_references: bool,
    pub seed: u64,
}

fn default_filler() -> usize {
    3
}

impl GeneratorConfig {
    pub fn ec_like(seed: u64) -> Self {
        let covariates = [
            ("expertiseSRExp", 0.15),
            ("prefPerc", -0.004),
            ("missingPref", -0.1),
            ("seniority", 0.1),
        ];
        Self {
            venue: VenueConfig::ec_like(),
            n_submissions: 300,
            n_reviewers: 150,
            reviewers_per_paper: 3,
            coefficients: Coefficients {
                intercept: 2.4,
                quality: 0.8,
                covariates: covariates.iter().map(|(k, v)| ((*k).to_owned(), *v)).collect(),
            },
            alpha_star: 0.0,
            sigma0: 1.0,
            quality_distribution: QualityDistribution { mean: 0.0, sd: 1.0 },
            citation_prevalence: 0.4,
            confounder_correlation: 0.0,
            missingness_rates: MissingnessRates {
                preference: 0.18,
                ..Default::default()
            },
            covariate_params: CovariateParams::default(),
            filler_references: default_filler(),
            skip_references: false,
            seed,
        }
    }

    pub fn icml_like(seed: u64) -> Self {
        let covariates = [
            ("expertiseSRExp", 0.1),
            ("expertiseSRConf", -0.1),
            ("expertiseText", 0.5),
            ("prefBid", 0.1),
            ("seniority", 0.1),
        ];
        Self {
            venue: VenueConfig::icml_like(),
            n_submissions: 1000,
            n_reviewers: 800,
            reviewers_per_paper: 4,
            coefficients: Coefficients {
                intercept: 2.5,
                quality: 0.6,
                covariates: covariates.iter().map(|(k, v)| ((*k).to_owned(), *v)).collect(),
            },
            alpha_star: 0.0,
            sigma0: 1.0,
            quality_distribution: QualityDistribution { mean: 0.0, sd: 1.0 },
            citation_prevalence: 0.3,
            confounder_correlation: 0.0,
            missingness_rates: MissingnessRates::default(),
            covariate_params: CovariateParams::default(),
            filler_references: default_filler(),
            skip_references: false,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        self.venue.validate()?;
        if !(self.sigma0 > 0.0) {
            return bad(format!("sigma0 must be positive, got {}", self.sigma0));
        }
        if !(self.quality_distribution.sd >= 0.0) {
            return bad("quality sd must be non-negative".into());
        }
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{name} must lie in [0, 1], got {v}")))
            }
        };
        unit("citation_prevalence", self.citation_prevalence)?;
        let m = &self.missingness_rates;
        unit("missingness preference", m.preference)?;
        unit("missingness confidence", m.confidence)?;
        unit("missingness text_overlap", m.text_overlap)?;
        unit("missingness bid", m.bid)?;
        let c = &self.covariate_params;
        unit("confidence_agreement", c.confidence_agreement)?;
        unit("seniority_rate", c.seniority_rate)?;
        unit("missing_citation_flag_rate", c.missing_citation_flag_rate)?;
        unit("adjudicated_fraction", c.adjudicated_fraction)?;
        if !(-1.0..=1.0).contains(&self.confounder_correlation) {
            return bad("confounder_correlation must lie in [-1, 1]".into());
        }
        if self.reviewers_per_paper == 0 || self.reviewers_per_paper > self.n_reviewers {
            return bad(format!(
                "infeasible load: {} reviewers per paper from a pool of {}",
                self.reviewers_per_paper, self.n_reviewers
            ));
        }
        if self.n_submissions == 0 {
            return bad("n_submissions must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTruth {
    pub submission_id: SubmissionId,
    pub reviewer_id: ReviewerId,
    pub cited: bool,
    pub latent_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub alpha_star: f64,
    pub quality: BTreeMap<SubmissionId, f64>,
    pub pairs: Vec<PairTruth>,
}

impl GroundTruth {
    pub fn latent_scores(&self) -> BTreeMap<Pair, f64> {
        self.pairs
            .iter()
            .map(|p| (Pair::new(p.submission_id.clone(), p.reviewer_id.clone()), p.latent_score))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedConference {
    pub dataset: ReviewDataset,
    pub relation: CitationRelation,
    pub truth: GroundTruth,
}

/// Stream-separated generator: stream 0 builds the reviewer pool, stream
/// `1 + i` everything about submission `i`.
fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn normal<R: Rng>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn categorical<R: Rng>(rng: &mut R, probs: &[f64]) -> usize {
    let total: f64 = probs.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, p) in probs.iter().enumerate() {
        if u < *p {
            return i;
        }
        u -= p;
    }
    probs.len() - 1
}

/// Category from a standard-normal latent by thresholding its CDF.
fn categorical_from_latent(z: f64, probs: &[f64]) -> usize {
    let std = Normal::standard();
    let total: f64 = probs.iter().sum();
    let u = std.cdf(z) * total;
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

struct RawPair {
    reviewer: usize,
    cited: bool,
    expertise: i32,
    confidence: i32,
    overlap: f64,
    bid: i32,
    preference: Option<i32>,
    mask_confidence: bool,
    mask_overlap: bool,
    mask_bid: bool,
    flag: bool,
    adjudicated: bool,
    noise: f64,
}

fn reviewer_pool(cfg: &GeneratorConfig) -> Vec<Reviewer> {
    let mut rng = stream_rng(cfg.seed, 0);
    let mut keys = HashSet::new();
    let mut pool = Vec::with_capacity(cfg.n_reviewers);
    let width = cfg.n_reviewers.to_string().len().max(4);
    while pool.len() < cfg.n_reviewers {
        let first = *render::FIRST_NAMES.choose(&mut rng).unwrap();
        let last = render::synthetic_surname(&mut rng);
        let key = format!("{}_{}", normalize_name(&last), normalize_name(first).chars().next().unwrap());
        if !keys.insert(key) {
            continue;
        }
        let i = pool.len();
        pool.push(Reviewer {
            id: ReviewerId(format!("r{i:0width$}")),
            last_name: last,
            first_name: first.to_owned(),
            seniority: u8::from(rng.random::<f64>() < cfg.covariate_params.seniority_rate),
            has_text_profile: true,
        });
    }
    pool
}

fn filler_author<R: Rng>(rng: &mut R, pool_keys: &HashSet<String>) -> AuthorName {
    loop {
        let a = AuthorName::new(
            render::FIRST_NAMES.choose(rng).unwrap(),
            render::LAST_NAMES.choose(rng).unwrap(),
        );
        let key = format!("{}_{}", normalize_name(&a.last), normalize_name(&a.first).chars().next().unwrap());
        if !pool_keys.contains(&key) {
            return a;
        }
    }
}

fn random_entry<R: Rng>(rng: &mut R, authors: Vec<AuthorName>) -> String {
    let format = *CitationFormat::ALL.choose(rng).unwrap();
    let et_al = rng.random::<f64>() < 0.15;
    let title = render::random_title(rng);
    let venue = *render::VENUES.choose(rng).unwrap();
    render_entry(format, &authors, et_al, &title, venue, rng.random_range(1990..2024))
}

/// Generate one conference. Deterministic in `config.seed`.
pub fn generate(config: &GeneratorConfig) -> Result<GeneratedConference> {
    config.validate()?;
    let policy = config.venue.venue_policy;
    let params = &config.covariate_params;
    let miss = &config.missingness_rates;
    let reviewers = reviewer_pool(config);
    let pool_keys: HashSet<String> = reviewers
        .iter()
        .map(|r| crate::citation::build_key(r).key)
        .collect();

    let rho = config.confounder_correlation;
    let cite_threshold = if config.citation_prevalence >= 1.0 {
        f64::NEG_INFINITY
    } else if config.citation_prevalence <= 0.0 {
        f64::INFINITY
    } else {
        Normal::standard().inverse_cdf(1.0 - config.citation_prevalence)
    };

    let width = config.n_submissions.to_string().len().max(4);
    let mut submissions = Vec::with_capacity(config.n_submissions);
    let mut qualities = Vec::with_capacity(config.n_submissions);
    let mut raw: Vec<Vec<RawPair>> = Vec::with_capacity(config.n_submissions);

    for i in 0..config.n_submissions {
        let mut rng = stream_rng(config.seed, 1 + i as u64);
        let quality = config.quality_distribution.mean + config.quality_distribution.sd * normal(&mut rng);
        let chosen = rand::seq::index::sample(&mut rng, reviewers.len(), config.reviewers_per_paper);
        let mut chosen: Vec<usize> = chosen.into_iter().collect();
        chosen.sort_unstable();

        let mut pairs = Vec::with_capacity(chosen.len());
        for reviewer in chosen {
            let z_cite = normal(&mut rng);
            let z_exp = rho * z_cite + (1.0 - rho * rho).max(0.0).sqrt() * normal(&mut rng);
            let cited = z_cite > cite_threshold;
            let expertise = 1 + categorical_from_latent(z_exp, &params.expertise_probs) as i32;
            let confidence = if rng.random::<f64>() < params.confidence_agreement {
                expertise
            } else {
                rng.random_range(1..=4)
            };
            let overlap = (params.overlap_base
                + params.overlap_per_expertise * f64::from(expertise - 1)
                + params.overlap_sd * normal(&mut rng))
            .clamp(0.0, 1.0);
            let overlap = (overlap * 100.0).round() / 100.0;
            let bid = 3 + categorical(&mut rng, &params.bid_probs) as i32;
            let preference = (rng.random::<f64>() >= miss.preference).then(|| rng.random_range(1..=100));
            let flag = rng.random::<f64>() < params.missing_citation_flag_rate;
            let adjudicated = flag && rng.random::<f64>() < params.adjudicated_fraction;
            pairs.push(RawPair {
                reviewer,
                cited,
                expertise,
                confidence,
                overlap,
                bid,
                preference,
                mask_confidence: rng.random::<f64>() < miss.confidence,
                mask_overlap: rng.random::<f64>() < miss.text_overlap,
                mask_bid: rng.random::<f64>() < miss.bid,
                flag,
                adjudicated,
                noise: normal(&mut rng),
            });
        }

        let mut entries = Vec::new();
        if !config.skip_references {
            for p in pairs.iter().filter(|p| p.cited) {
                let r = &reviewers[p.reviewer];
                let mut authors: Vec<AuthorName> = (0..rng.random_range(0..3))
                    .map(|_| filler_author(&mut rng, &pool_keys))
                    .collect();
                let at = rng.random_range(0..=authors.len());
                authors.insert(at, AuthorName::new(&r.first_name, &r.last_name));
                entries.push(random_entry(&mut rng, authors));
            }
            for _ in 0..config.filler_references {
                let authors = (0..rng.random_range(1..4))
                    .map(|_| filler_author(&mut rng, &pool_keys))
                    .collect();
                entries.push(random_entry(&mut rng, authors));
            }
        }

        submissions.push(Submission {
            id: SubmissionId(format!("s{i:0width$}")),
            reference_entries: entries,
            withdrawn: false,
        });
        qualities.push(quality);
        raw.push(pairs);
    }

    let mut reviews = Vec::new();
    for (s, pairs) in submissions.iter().zip(&raw) {
        for p in pairs {
            let icml = policy == VenuePolicy::IcmlLike;
            reviews.push(ReviewRecord {
                submission_id: s.id.clone(),
                reviewer_id: reviewers[p.reviewer].id.clone(),
                score: config.venue.score_min,
                sr_expertise: p.expertise,
                sr_confidence: (icml && !p.mask_confidence).then_some(p.confidence),
                text_overlap: (icml && !p.mask_overlap).then_some(p.overlap),
                bid: (icml && !p.mask_bid).then_some(p.bid),
                preference_value: if icml { None } else { p.preference },
                missing_citation_flag: p.flag,
                exclusion_adjudicated: p.adjudicated,
            });
        }
    }
    let dataset = ReviewDataset::new(config.venue.clone(), reviewers, submissions, reviews)?;
    let (derived, _) = derive_covariates(&dataset);
    let covs = derived.covariates.as_ref().expect("covariates derived");
    let names = covariate_names(policy);

    let mut truth_pairs = Vec::with_capacity(dataset.reviews.len());
    let mut relation_pairs = Vec::with_capacity(dataset.reviews.len());
    let mut scored = dataset.clone();
    let mut idx = 0;
    for (si, pairs) in raw.iter().enumerate() {
        for p in pairs {
            let rec = &mut scored.reviews[idx];
            // Score from the unmasked covariate values.
            let values: Vec<f64> = match policy {
                VenuePolicy::EcLike => covs[idx].covariate_vector.clone().expect("EC covariates are complete"),
                VenuePolicy::IcmlLike => vec![
                    f64::from(p.expertise),
                    f64::from(p.confidence),
                    p.overlap,
                    f64::from(p.bid),
                    f64::from(scored.reviewers[p.reviewer].seniority),
                ],
            };
            let explained: f64 = names
                .iter()
                .zip(&values)
                .map(|(n, v)| config.coefficients.get(n) * v)
                .sum();
            let latent = config.coefficients.intercept
                + config.coefficients.quality * qualities[si]
                + explained
                + if p.cited { config.alpha_star } else { 0.0 }
                + config.sigma0 * p.noise;
            rec.score = (latent.round() as i64).clamp(
                i64::from(config.venue.score_min),
                i64::from(config.venue.score_max),
            ) as i32;
            truth_pairs.push(PairTruth {
                submission_id: rec.submission_id.clone(),
                reviewer_id: rec.reviewer_id.clone(),
                cited: p.cited,
                latent_score: latent,
            });
            relation_pairs.push((rec.pair(), p.cited));
            idx += 1;
        }
    }
    scored.validate()?;

    let truth = GroundTruth {
        alpha_star: config.alpha_star,
        quality: scored
            .submissions
            .iter()
            .zip(&qualities)
            .map(|(s, q)| (s.id.clone(), *q))
            .collect(),
        pairs: truth_pairs,
    };
    Ok(GeneratedConference {
        dataset: scored,
        relation: CitationRelation::from_indicators(relation_pairs),
        truth,
    })
}
