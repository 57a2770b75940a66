use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{Assignment, SimilarityMatrix, SweepPoint};
use crate::citation::CitationRelation;
use crate::error::{Error, Result};
use crate::ids::Pair;

fn parse_error(file: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        file: file.into(),
        line,
        message: message.into(),
    }
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r)
}

#[derive(Debug, Deserialize)]
struct SimRow {
    submission_id: String,
    reviewer_id: String,
    sim: f64,
}

/// Parse `similarity.csv` (`submission_id,reviewer_id,sim`).
pub fn parse_similarity<R: Read>(r: R) -> Result<SimilarityMatrix> {
    let mut sim = BTreeMap::new();
    for (i, row) in reader(r).deserialize::<SimRow>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| parse_error("similarity.csv", line, e.to_string()))?;
        if !(0.0..=1.0).contains(&row.sim) {
            return Err(parse_error("similarity.csv", line, format!("sim {} outside [0, 1]", row.sim)));
        }
        let pair = Pair::new(row.submission_id, row.reviewer_id);
        if sim.insert(pair.clone(), row.sim).is_some() {
            return Err(parse_error("similarity.csv", line, format!("duplicate pair {pair}")));
        }
    }
    SimilarityMatrix::new(sim, BTreeSet::new())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceRow {
    pub pair: Pair,
    /// Bid (ICML-like) or preference (EC-like); `None` when not entered.
    pub value: Option<i32>,
}

#[derive(Debug, Deserialize)]
struct PrefCsv {
    submission_id: String,
    reviewer_id: String,
    value: Option<i32>,
}

/// Parse a preferences file (`submission_id,reviewer_id,value`); an empty
/// value means not entered.
pub fn parse_preferences<R: Read>(r: R) -> Result<Vec<PreferenceRow>> {
    reader(r)
        .deserialize::<PrefCsv>()
        .enumerate()
        .map(|(i, row)| {
            let row = row.map_err(|e| parse_error("preferences.csv", i + 2, e.to_string()))?;
            Ok(PreferenceRow {
                pair: Pair::new(row.submission_id, row.reviewer_id),
                value: row.value,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EditAction {
    Add,
    Remove,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edit {
    pub action: EditAction,
    pub pair: Pair,
}

#[derive(Debug, Deserialize)]
struct EditCsv {
    action: EditAction,
    submission_id: String,
    reviewer_id: String,
}

/// Parse a manual edit file (`action,submission_id,reviewer_id`, action is
/// `add` or `remove`).
pub fn parse_edits<R: Read>(r: R) -> Result<Vec<Edit>> {
    reader(r)
        .deserialize::<EditCsv>()
        .enumerate()
        .map(|(i, row)| {
            let row = row.map_err(|e| parse_error("edits.csv", i + 2, e.to_string()))?;
            Ok(Edit {
                action: row.action,
                pair: Pair::new(row.submission_id, row.reviewer_id),
            })
        })
        .collect()
}

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::InvalidArgument(format!("writing csv: {e}"))
}

/// `submission_id,reviewer_id,sim,cited`
pub fn write_assignment_csv<W: Write>(
    w: W,
    assignment: &Assignment,
    sim: &SimilarityMatrix,
    relation: &CitationRelation,
) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["submission_id", "reviewer_id", "sim", "cited"]).map_err(csv_err)?;
    for p in &assignment.pairs {
        wtr.write_record([
            p.submission_id.as_str(),
            p.reviewer_id.as_str(),
            &sim.sim.get(p).copied().unwrap_or(0.0).to_string(),
            if relation.is_cited(p) { "1" } else { "0" },
        ])
        .map_err(csv_err)?;
    }
    wtr.flush().map_err(csv_err)
}

pub fn write_sweep_csv<W: Write>(w: W, points: &[SweepPoint]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for p in points {
        wtr.serialize(p).map_err(csv_err)?;
    }
    wtr.flush().map_err(csv_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn similarity_round_trip_and_errors() {
        let text = "submission_id,reviewer_id,sim\np1,r1,0.5\np1,r2,0.25\n";
        let m = parse_similarity(text.as_bytes()).unwrap();
        assert_eq!(m.sim.len(), 2);
        let bad = "submission_id,reviewer_id,sim\np1,r1,1.5\n";
        assert!(matches!(parse_similarity(bad.as_bytes()), Err(Error::Parse { line: 2, .. })));
        let dup = "submission_id,reviewer_id,sim\np1,r1,0.5\np1,r1,0.5\n";
        assert!(matches!(parse_similarity(dup.as_bytes()), Err(Error::Parse { line: 3, .. })));
        let gap = "submission_id,reviewer_id,sim\np1,r1,0.5\np2,r2,0.5\n";
        assert!(matches!(parse_similarity(gap.as_bytes()), Err(Error::Validation(_))));
    }

    #[test]
    fn preferences_and_edits() {
        let p = parse_preferences("submission_id,reviewer_id,value\np1,r1,\np1,r2,-5\n".as_bytes()).unwrap();
        assert_eq!(p[0].value, None);
        assert_eq!(p[1].value, Some(-5));
        let e = parse_edits("action,submission_id,reviewer_id\nadd,p1,r1\nremove,p2,r2\n".as_bytes()).unwrap();
        assert_eq!(e[1].action, EditAction::Remove);
        assert!(parse_edits("action,submission_id,reviewer_id\nswap,p1,r1\n".as_bytes()).is_err());
    }
}
