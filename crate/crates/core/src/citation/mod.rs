//! Citation relation between submissions and reviewers.
//!
//! Authors are parsed out of each submission's reference entries, turned into
//! `LASTNAME_F` keys and matched against the reviewer pool. Pairs whose
//! reviewer key is shared by several pool members are held as ambiguous and
//! count as uncited until a manual override settles them.

mod key;
mod parse;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::{Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use key::{author_key, build_key, normalize_name, ReviewerKey, PLACEHOLDER_INITIAL};
pub use parse::{parse_reference_entry, ParsedAuthor, ParsedEntry};

use crate::dataset::ReviewDataset;
use crate::error::{Error, Result, Warning};
use crate::ids::{Pair, ReviewerId};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "RelationWire", from = "RelationWire")]
pub struct CitationRelation {
    /// Parser verdict per assigned pair.
    cited: BTreeMap<Pair, bool>,
    ambiguous: BTreeSet<Pair>,
    audited: BTreeSet<Pair>,
    overrides: BTreeMap<Pair, bool>,
}

impl CitationRelation {
    /// Relation with known indicators and no ambiguity.
    pub fn from_indicators(pairs: impl IntoIterator<Item = (Pair, bool)>) -> Self {
        Self {
            cited: pairs.into_iter().collect(),
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.cited.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cited.is_empty()
    }

    pub fn covers(&self, pair: &Pair) -> bool {
        self.cited.contains_key(pair)
    }

    /// Final indicator: the override when present, else the parser verdict.
    /// Unresolved ambiguous pairs read as uncited.
    pub fn indicator(&self, pair: &Pair) -> Option<bool> {
        if let Some(&v) = self.overrides.get(pair) {
            return Some(v);
        }
        let verdict = *self.cited.get(pair)?;
        Some(verdict && !self.ambiguous.contains(pair))
    }

    pub fn is_cited(&self, pair: &Pair) -> bool {
        self.indicator(pair).unwrap_or(false)
    }

    pub fn parser_verdict(&self, pair: &Pair) -> Option<bool> {
        self.cited.get(pair).copied()
    }

    pub fn ambiguous_pairs(&self) -> &BTreeSet<Pair> {
        &self.ambiguous
    }

    pub fn audited_pairs(&self) -> &BTreeSet<Pair> {
        &self.audited
    }

    pub fn overrides(&self) -> &BTreeMap<Pair, bool> {
        &self.overrides
    }

    /// Ambiguous pairs still waiting for manual verification.
    pub fn unresolved(&self) -> impl Iterator<Item = &Pair> {
        self.ambiguous.iter().filter(|p| !self.overrides.contains_key(*p))
    }

    pub fn pairs(&self) -> impl Iterator<Item = &Pair> {
        self.cited.keys()
    }

    pub fn mark_audited<'a>(&mut self, pairs: impl IntoIterator<Item = &'a Pair>) {
        self.audited.extend(pairs.into_iter().cloned());
    }

    /// Record a manual verification result. Only ambiguous or audited pairs
    /// may be overridden.
    pub fn apply_override(&mut self, pair: Pair, cited: bool) -> Result<()> {
        let reject = |reason: &str| Error::Override {
            submission_id: pair.submission_id.to_string(),
            reviewer_id: pair.reviewer_id.to_string(),
            reason: reason.to_owned(),
        };
        if !self.cited.contains_key(&pair) {
            return Err(reject("pair is not in the relation"));
        }
        if !self.ambiguous.contains(&pair) && !self.audited.contains(&pair) {
            return Err(reject("pair is neither ambiguous nor audited"));
        }
        self.overrides.insert(pair, cited);
        Ok(())
    }

    /// Pairs of one stratum. Unresolved ambiguous pairs belong to neither.
    pub fn stratum(&self, stratum: Stratum) -> Vec<&Pair> {
        let want = stratum == Stratum::Cited;
        self.cited
            .keys()
            .filter(|p| !(self.ambiguous.contains(*p) && !self.overrides.contains_key(*p)))
            .filter(|p| self.is_cited(p) == want)
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RelationWire {
    pairs: Vec<PairState>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PairState {
    submission_id: crate::ids::SubmissionId,
    reviewer_id: ReviewerId,
    parser_cited: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    ambiguous: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    audited: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r#override: Option<bool>,
}

impl From<CitationRelation> for RelationWire {
    fn from(rel: CitationRelation) -> Self {
        let pairs = rel
            .cited
            .iter()
            .map(|(pair, &parser_cited)| PairState {
                submission_id: pair.submission_id.clone(),
                reviewer_id: pair.reviewer_id.clone(),
                parser_cited,
                ambiguous: rel.ambiguous.contains(pair),
                audited: rel.audited.contains(pair),
                r#override: rel.overrides.get(pair).copied(),
            })
            .collect();
        RelationWire { pairs }
    }
}

impl From<RelationWire> for CitationRelation {
    fn from(wire: RelationWire) -> Self {
        let mut rel = CitationRelation::default();
        for p in wire.pairs {
            let pair = Pair {
                submission_id: p.submission_id,
                reviewer_id: p.reviewer_id,
            };
            if p.ambiguous {
                rel.ambiguous.insert(pair.clone());
            }
            if p.audited {
                rel.audited.insert(pair.clone());
            }
            if let Some(v) = p.r#override {
                rel.overrides.insert(pair.clone(), v);
            }
            rel.cited.insert(pair, p.parser_cited);
        }
        rel
    }
}

/// Author keys cited by each submission's reference list.
fn submission_author_keys(dataset: &ReviewDataset) -> (HashMap<&crate::ids::SubmissionId, HashSet<String>>, Vec<Warning>) {
    let per_submission: Vec<_> = dataset
        .submissions
        .par_iter()
        .map(|s| {
            let mut keys = HashSet::new();
            let mut warnings = Vec::new();
            for (i, entry) in s.reference_entries.iter().enumerate() {
                let parsed = parse_reference_entry(entry);
                if let Some(w) = parsed.warning {
                    warnings.push(Warning::new(format!("submission {} entry {}", s.id, i + 1), w));
                }
                keys.extend(parsed.authors.iter().map(|a| author_key(a).key));
            }
            (&s.id, keys, warnings)
        })
        .collect();
    let mut warnings = Vec::new();
    let mut map = HashMap::new();
    for (id, keys, w) in per_submission {
        warnings.extend(w);
        map.insert(id, keys);
    }
    (map, warnings)
}

/// Build the citation relation over `assignment`.
///
/// A pair is cited iff some author key in the submission's references equals
/// the reviewer's key. Matches on keys shared with another pool member (or on
/// placeholder keys) go to the ambiguous set instead.
pub fn detect_citations(
    dataset: &ReviewDataset,
    assignment: &BTreeSet<Pair>,
) -> Result<(CitationRelation, Vec<Warning>)> {
    let reviewer_keys: HashMap<&ReviewerId, ReviewerKey> =
        dataset.reviewers.iter().map(|r| (&r.id, build_key(r))).collect();
    let mut key_counts: HashMap<&str, usize> = HashMap::new();
    for k in reviewer_keys.values() {
        *key_counts.entry(k.key.as_str()).or_default() += 1;
    }
    let (cited_keys, mut warnings) = submission_author_keys(dataset);

    for r in &dataset.reviewers {
        if reviewer_keys[&r.id].placeholder_initial {
            warnings.push(Warning::new(
                format!("reviewer {}", r.id),
                "no first-name initial; key uses a placeholder and matches are ambiguous",
            ));
        }
    }

    let mut relation = CitationRelation::default();
    for pair in assignment {
        let key = reviewer_keys.get(&pair.reviewer_id).ok_or_else(|| {
            Error::Referential(format!("assignment names unknown reviewer {}", pair.reviewer_id))
        })?;
        let keys = cited_keys.get(&pair.submission_id).ok_or_else(|| {
            Error::Referential(format!("assignment names unknown submission {}", pair.submission_id))
        })?;
        let matched = keys.contains(&key.key);
        if matched && (key_counts[key.key.as_str()] > 1 || key.placeholder_initial) {
            relation.ambiguous.insert(pair.clone());
        }
        relation.cited.insert(pair.clone(), matched);
    }
    Ok((relation, warnings))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Stratum {
    Cited,
    Uncited,
}

impl Stratum {
    pub fn as_str(self) -> &'static str {
        match self {
            Stratum::Cited => "CITED",
            Stratum::Uncited => "UNCITED",
        }
    }
}

/// Uniform sample without replacement of `min(n, |stratum|)` pairs, sorted.
pub fn audit_sample(relation: &CitationRelation, stratum: Stratum, n: usize, seed: u64) -> Result<Vec<Pair>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let pool = relation.stratum(stratum);
    if pool.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "audit stratum {} is empty",
            stratum.as_str()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let take = n.min(pool.len());
    let mut picked: Vec<Pair> = rand::seq::index::sample(&mut rng, pool.len(), take)
        .into_iter()
        .map(|i| pool[i].clone())
        .collect();
    picked.sort();
    Ok(picked)
}

#[derive(Debug, Deserialize)]
struct OverrideRow {
    submission_id: String,
    reviewer_id: String,
    cited: u8,
}

/// Parse `overrides.csv` (`submission_id,reviewer_id,cited`).
pub fn parse_overrides<R: Read>(reader: R) -> Result<Vec<(Pair, bool)>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<OverrideRow>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::Parse {
            file: "overrides.csv".into(),
            line,
            message: e.to_string(),
        })?;
        let cited = match row.cited {
            0 => false,
            1 => true,
            other => {
                return Err(Error::Parse {
                    file: "overrides.csv".into(),
                    line,
                    message: format!("cited must be 0 or 1, got {other}"),
                })
            }
        };
        out.push((Pair::new(row.submission_id, row.reviewer_id), cited));
    }
    Ok(out)
}

/// Write an audit sample as CSV (`submission_id,reviewer_id,stratum,reviewer_key`).
pub fn write_audit_csv<W: Write>(
    writer: W,
    dataset: &ReviewDataset,
    stratum: Stratum,
    pairs: &[Pair],
) -> Result<()> {
    let reviewers = dataset.reviewer_index();
    let mut wtr = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| Error::InvalidArgument(format!("writing audit csv: {e}"));
    wtr.write_record(["submission_id", "reviewer_id", "stratum", "reviewer_key"])
        .map_err(io)?;
    for p in pairs {
        let key = reviewers
            .get(&p.reviewer_id)
            .map(|r| build_key(r).key)
            .unwrap_or_default();
        wtr.write_record([p.submission_id.as_str(), p.reviewer_id.as_str(), stratum.as_str(), &key])
            .map_err(io)?;
    }
    wtr.flush().map_err(|e| Error::InvalidArgument(format!("writing audit csv: {e}")))?;
    Ok(())
}
