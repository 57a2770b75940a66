use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ReviewDataset;
use crate::citation::CitationRelation;

/// Venue-level citation statistics over non-withdrawn submissions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryTable {
    pub reviewers: usize,
    pub submissions: usize,
    pub submissions_with_cited: usize,
    /// In [0, 1].
    pub fraction_with_cited: f64,
}

pub fn summarize(dataset: &ReviewDataset, relation: &CitationRelation) -> SummaryTable {
    let active: BTreeSet<_> = dataset
        .submissions
        .iter()
        .filter(|s| !s.withdrawn)
        .map(|s| &s.id)
        .collect();
    let with_cited: BTreeSet<_> = dataset
        .reviews
        .iter()
        .filter(|r| active.contains(&r.submission_id))
        .filter(|r| relation.is_cited(&r.pair()))
        .map(|r| &r.submission_id)
        .collect();
    SummaryTable::new(dataset.reviewers.len(), active.len(), with_cited.len())
}

impl SummaryTable {
    pub fn new(reviewers: usize, submissions: usize, submissions_with_cited: usize) -> Self {
        let fraction_with_cited = if submissions == 0 {
            0.0
        } else {
            submissions_with_cited as f64 / submissions as f64
        };
        Self {
            reviewers,
            submissions,
            submissions_with_cited,
            fraction_with_cited,
        }
    }
}

impl fmt::Display for SummaryTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<58}{:>10}", "# Reviewers", group_thousands(self.reviewers))?;
        writeln!(f, "{:<58}{:>10}", "# Submissions", group_thousands(self.submissions))?;
        writeln!(
            f,
            "{:<58}{:>10}",
            "Number of submissions with at least one cited reviewer",
            group_thousands(self.submissions_with_cited)
        )?;
        writeln!(
            f,
            "{:<58}{:>9.0}%",
            "Fraction of submissions with at least one cited reviewer",
            100.0 * self.fraction_with_cited
        )
    }
}

pub(crate) fn group_thousands(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::new();
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_reference_counts() {
        let t = SummaryTable::new(3064, 4991, 1513);
        let text = t.to_string();
        assert!(text.contains("3,064"));
        assert!(text.contains("4,991"));
        assert!(text.contains("1,513"));
        assert!(text.contains("30%"), "{text}");
    }

    #[test]
    fn empty_relation_gives_zero_fraction() {
        let d = crate::dataset::tests::tiny();
        let t = summarize(&d, &CitationRelation::default());
        assert_eq!(t.submissions_with_cited, 0);
        assert_eq!(t.fraction_with_cited, 0.0);
        assert!(t.to_string().contains(" 0%"));
    }
}
