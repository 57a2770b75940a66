//! JSON-Lines storage for review datasets.
//!
//! Layout inside a dataset directory: `reviewers.jsonl`, `submissions.jsonl`,
//! `reviews.jsonl`, plus an optional `venue.json`. One object per line, field
//! names as in the record types, absent optional fields omitted.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{ReviewDataset, ReviewRecord, Reviewer, Submission, VenueConfig};
use crate::error::{Error, Result};
use crate::ids::SubmissionId;

pub const REVIEWERS_FILE: &str = "reviewers.jsonl";
pub const SUBMISSIONS_FILE: &str = "submissions.jsonl";
pub const REVIEWS_FILE: &str = "reviews.jsonl";
pub const VENUE_FILE: &str = "venue.json";
pub const REFERENCES_FILE: &str = "references.jsonl";

/// One line of `references.jsonl`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceRecord {
    pub submission_id: SubmissionId,
    pub entries: Vec<String>,
}

/// Parse a JSON-Lines stream. Blank lines are skipped; `label` names the
/// source in error messages.
pub fn read_jsonl<T: DeserializeOwned, R: Read>(reader: R, label: &str) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| Error::Parse {
            file: label.to_owned(),
            line: i + 1,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|e| Error::Parse {
            file: label.to_owned(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(value);
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize, W: Write>(mut writer: W, items: &[T]) -> std::io::Result<()> {
    for item in items {
        serde_json::to_writer(&mut writer, item)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

fn read_file<T: DeserializeOwned>(dir: &Path, name: &str) -> Result<Vec<T>> {
    let path = dir.join(name);
    let file = fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
    read_jsonl(file, name)
}

fn write_file<T: Serialize>(dir: &Path, name: &str, items: &[T]) -> Result<()> {
    let path = dir.join(name);
    let mut buf = Vec::new();
    write_jsonl(&mut buf, items).map_err(|e| Error::io(&path, e))?;
    fs::write(&path, buf).map_err(|e| Error::io(&path, e))
}

pub fn parse_venue_config(text: &str) -> Result<VenueConfig> {
    let cfg: VenueConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
        file: VENUE_FILE.to_owned(),
        line: e.line(),
        message: e.to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_venue_config(path: &Path) -> Result<VenueConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_venue_config(&text)
}

pub fn save_venue_config(cfg: &VenueConfig, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(cfg).expect("venue config serializes");
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Load and validate the three JSON-Lines files in `dir`.
pub fn load_dataset(dir: &Path, config: VenueConfig) -> Result<ReviewDataset> {
    let reviewers: Vec<Reviewer> = read_file(dir, REVIEWERS_FILE)?;
    let submissions: Vec<Submission> = read_file(dir, SUBMISSIONS_FILE)?;
    let reviews: Vec<ReviewRecord> = read_file(dir, REVIEWS_FILE)?;
    ReviewDataset::new(config, reviewers, submissions, reviews)
}

/// Write the dataset in canonical form (stored order, compact JSON lines).
pub fn save_dataset(dataset: &ReviewDataset, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_file(dir, REVIEWERS_FILE, &dataset.reviewers)?;
    write_file(dir, SUBMISSIONS_FILE, &dataset.submissions)?;
    write_file(dir, REVIEWS_FILE, &dataset.reviews)
}

pub fn load_references(path: &Path) -> Result<Vec<ReferenceRecord>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_jsonl(file, REFERENCES_FILE)
}

/// Replace submissions' reference entries with those from `references`.
pub fn apply_references(dataset: &mut ReviewDataset, references: Vec<ReferenceRecord>) -> Result<()> {
    let positions: std::collections::HashMap<SubmissionId, usize> = dataset
        .submissions
        .iter()
        .enumerate()
        .map(|(i, s)| (s.id.clone(), i))
        .collect();
    for rec in references {
        let idx = *positions.get(&rec.submission_id).ok_or_else(|| {
            Error::Referential(format!(
                "references.jsonl names unknown submission {}",
                rec.submission_id
            ))
        })?;
        dataset.submissions[idx].reference_entries = rec.entries;
    }
    Ok(())
}
