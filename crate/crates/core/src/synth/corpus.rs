//! Reference lists with known authorship, for checking citation detection.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::render::{self, render_entry, AuthorName, CitationFormat};
use crate::citation::build_key;
use crate::dataset::{ReviewDataset, Reviewer, Submission, VenueConfig};
use crate::error::Result;
use crate::ids::{Pair, ReviewerId, SubmissionId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusConfig {
    pub n_entries: usize,
    pub n_reviewers: usize,
    /// Groups of two reviewers deliberately sharing a key.
    pub collision_groups: usize,
    pub max_authors: usize,
    /// Probability that an entry names a pool reviewer.
    pub reviewer_author_rate: f64,
    pub et_al_rate: f64,
    /// Extra non-citing reviewers assigned to each submission.
    pub decoys_per_submission: usize,
    pub seed: u64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            n_entries: 1000,
            n_reviewers: 80,
            collision_groups: 8,
            max_authors: 4,
            reviewer_author_rate: 0.6,
            et_al_rate: 0.15,
            decoys_per_submission: 2,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderedEntry {
    pub format: CitationFormat,
    pub authors: Vec<AuthorName>,
    pub et_al: bool,
    pub text: String,
}

/// One submission per entry; the reviewers it truly cites are recorded
/// alongside the assignment used to probe detection.
#[derive(Debug, Clone)]
pub struct ReferenceCorpus {
    pub entries: Vec<RenderedEntry>,
    pub reviewers: Vec<Reviewer>,
    pub submissions: Vec<Submission>,
    pub assignment: BTreeSet<Pair>,
    /// True authorship over `assignment`.
    pub truth: BTreeMap<Pair, bool>,
    /// Assigned pairs whose reviewer key matches an author and is shared
    /// with another reviewer.
    pub expected_ambiguous: BTreeSet<Pair>,
}

impl ReferenceCorpus {
    pub fn dataset(&self) -> Result<ReviewDataset> {
        ReviewDataset::new(VenueConfig::ec_like(), self.reviewers.clone(), self.submissions.clone(), Vec::new())
    }
}

fn author_key(a: &AuthorName) -> String {
    build_key(&Reviewer {
        id: ReviewerId::from(""),
        last_name: a.last.clone(),
        first_name: a.first.clone(),
        seniority: 0,
        has_text_profile: false,
    })
    .key
}

fn partner_first_name(first: &str) -> &'static str {
    let initial = first.chars().next();
    render::FIRST_NAMES
        .iter()
        .find(|n| **n != first && n.chars().next() == initial)
        .copied()
        .unwrap_or(render::FIRST_NAMES[0])
}

fn pool(cfg: &CorpusConfig, rng: &mut ChaCha8Rng) -> Vec<(Reviewer, AuthorName)> {
    let mut keys = HashSet::new();
    let mut out: Vec<(Reviewer, AuthorName)> = Vec::new();
    let singles = cfg.n_reviewers.saturating_sub(2 * cfg.collision_groups);
    let push = |name: AuthorName, out: &mut Vec<(Reviewer, AuthorName)>| {
        let i = out.len();
        out.push((
            Reviewer {
                id: ReviewerId(format!("r{i:04}")),
                last_name: name.last.clone(),
                first_name: name.first.clone(),
                seniority: 0,
                has_text_profile: true,
            },
            name,
        ));
    };
    while out.len() < singles {
        // Mix plain synthetic surnames with the harder curated ones.
        let last = if rng.random::<f64>() < 0.5 {
            render::synthetic_surname(rng)
        } else {
            format!("{}{}", render::LAST_NAMES.choose(rng).unwrap(), render::synthetic_surname(rng).to_lowercase())
        };
        let name = AuthorName::new(render::FIRST_NAMES.choose(rng).unwrap(), &last);
        if keys.insert(author_key(&name)) {
            push(name, &mut out);
        }
    }
    let mut groups = 0;
    while groups < cfg.collision_groups {
        let first = *render::FIRST_NAMES.choose(rng).unwrap();
        let a = AuthorName::new(first, &render::synthetic_surname(rng));
        if !keys.insert(author_key(&a)) {
            continue;
        }
        let b = AuthorName::new(partner_first_name(first), &a.last);
        push(a, &mut out);
        push(b, &mut out);
        groups += 1;
    }
    out
}

pub fn reference_corpus(cfg: &CorpusConfig) -> ReferenceCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pool = pool(cfg, &mut rng);
    let pool_keys: HashSet<String> = pool.iter().map(|(_, n)| author_key(n)).collect();
    let mut key_members: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, (_, n)) in pool.iter().enumerate() {
        key_members.entry(author_key(n)).or_default().push(i);
    }

    let mut entries = Vec::with_capacity(cfg.n_entries);
    let mut submissions = Vec::with_capacity(cfg.n_entries);
    let mut assignment = BTreeSet::new();
    let mut truth = BTreeMap::new();
    let mut expected_ambiguous = BTreeSet::new();
    let max_authors = cfg.max_authors.max(1);

    for e in 0..cfg.n_entries {
        let format = CitationFormat::ALL[e % CitationFormat::ALL.len()];
        let n_authors = rng.random_range(1..=max_authors);
        let mut authors = Vec::with_capacity(n_authors);
        let mut cited = BTreeSet::new();
        if !pool.is_empty() && rng.random::<f64>() < cfg.reviewer_author_rate {
            let r = rng.random_range(0..pool.len());
            cited.insert(r);
        }
        while authors.len() + cited.len() < n_authors {
            let a = AuthorName::new(
                render::FIRST_NAMES.choose(&mut rng).unwrap(),
                render::LAST_NAMES.choose(&mut rng).unwrap(),
            );
            if !pool_keys.contains(&author_key(&a)) {
                authors.push(a);
            }
        }
        for &r in &cited {
            let at = rng.random_range(0..=authors.len());
            authors.insert(at, pool[r].1.clone());
        }
        let et_al = rng.random::<f64>() < cfg.et_al_rate;
        let title = render::random_title(&mut rng);
        let venue = *render::VENUES.choose(&mut rng).unwrap();
        let text = render_entry(format, &authors, et_al, &title, venue, rng.random_range(1990..2024));

        let sid = SubmissionId(format!("s{e:05}"));
        let mut assigned: BTreeSet<usize> = cited.clone();
        for &r in &cited {
            assigned.extend(key_members[&author_key(&pool[r].1)].iter().copied());
        }
        for _ in 0..cfg.decoys_per_submission.min(pool.len()) {
            assigned.insert(rng.random_range(0..pool.len()));
        }
        let entry_keys: HashSet<String> = authors.iter().map(author_key).collect();
        for r in assigned {
            let pair = Pair::new(sid.clone(), pool[r].0.id.clone());
            let key = author_key(&pool[r].1);
            if entry_keys.contains(&key) && key_members[&key].len() > 1 {
                expected_ambiguous.insert(pair.clone());
            }
            truth.insert(pair.clone(), cited.contains(&r));
            assignment.insert(pair);
        }
        submissions.push(Submission {
            id: sid,
            reference_entries: vec![text.clone()],
            withdrawn: false,
        });
        entries.push(RenderedEntry { format, authors, et_al, text });
    }

    ReferenceCorpus {
        entries,
        reviewers: pool.into_iter().map(|(r, _)| r).collect(),
        submissions,
        assignment,
        truth,
        expected_ambiguous,
    }
}
