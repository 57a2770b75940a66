//! Result tables: estimate, interval, p-value and sample sizes per analysis.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dataset::{group_thousands, VenueConfig};
use crate::error::{Error, Result};
use crate::filter::{AnalysisDataset, FilterReport};
use crate::nonparametric::{MatchedTriple, PermutationResult};
use crate::parametric::{FitResult, Interval};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalysisKind {
    Parametric,
    Nonparametric,
}

impl AnalysisKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AnalysisKind::Parametric => "parametric",
            AnalysisKind::Nonparametric => "non-parametric",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSizes {
    pub submissions: usize,
    pub reviewers: usize,
    pub pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasReport {
    pub venue: String,
    pub analysis: AnalysisKind,
    pub sample_sizes: SampleSizes,
    pub statistic: f64,
    pub ci95: Option<Interval>,
    pub p_two_sided: f64,
    pub caveats: Vec<String>,
}

fn check_range(config: &VenueConfig, statistic: f64) -> Result<()> {
    let span = config.score_span();
    if !(statistic.abs() <= span) {
        return Err(Error::Validation(format!(
            "statistic {statistic} outside the admissible range [-{span}, {span}]"
        )));
    }
    Ok(())
}

fn filter_caveats(filter: &FilterReport) -> Vec<String> {
    let mut caveats: Vec<String> = filter
        .warnings
        .iter()
        .filter(|w| w.context == "parametric caveat" || w.context == "citation relation")
        .map(|w| w.message.clone())
        .collect();
    if !filter.excluded_submissions.is_empty() {
        caveats.push(format!(
            "{} submissions excluded for adjudicated missing citations",
            filter.excluded_submissions.len()
        ));
    }
    caveats
}

impl BiasReport {
    pub fn parametric(config: &VenueConfig, filter: &FilterReport, fit: &FitResult) -> Result<Self> {
        check_range(config, fit.alpha_star.estimate)?;
        if fit.n_rows != filter.eligible_submissions {
            return Err(Error::Validation(format!(
                "fit has {} rows but the filter retained {} submissions",
                fit.n_rows, filter.eligible_submissions
            )));
        }
        Ok(Self {
            venue: config.label().to_owned(),
            analysis: AnalysisKind::Parametric,
            sample_sizes: SampleSizes {
                submissions: filter.eligible_submissions,
                reviewers: filter.retained_reviewers,
                pairs: filter.retained_pairs,
            },
            statistic: fit.alpha_star.estimate,
            ci95: Some(fit.alpha_star.ci95),
            p_two_sided: fit.alpha_star.p_value,
            caveats: filter_caveats(filter),
        })
    }

    pub fn nonparametric(
        config: &VenueConfig,
        filter: &FilterReport,
        triples: &[MatchedTriple],
        result: &PermutationResult,
    ) -> Result<Self> {
        check_range(config, result.tau)?;
        if result.k != triples.len() {
            return Err(Error::Validation(format!(
                "result reports K = {} but {} triples were given",
                result.k,
                triples.len()
            )));
        }
        let submissions: BTreeSet<_> = triples.iter().map(|t| &t.submission_id).collect();
        let reviewers: BTreeSet<_> = triples
            .iter()
            .flat_map(|t| [&t.cited_reviewer_id, &t.uncited_reviewer_id])
            .collect();
        let mut caveats: Vec<String> = filter_caveats(filter)
            .into_iter()
            .filter(|c| !c.contains("unaccounted"))
            .collect();
        if result.exact {
            caveats.push("p-value from exact enumeration of sign patterns".into());
        }
        Ok(Self {
            venue: config.label().to_owned(),
            analysis: AnalysisKind::Nonparametric,
            sample_sizes: SampleSizes {
                submissions: submissions.len(),
                reviewers: reviewers.len(),
                pairs: 2 * triples.len(),
            },
            statistic: result.tau,
            ci95: result.ci95_bootstrap,
            p_two_sided: result.p_two_sided,
            caveats,
        })
    }

    /// Sample sizes straight from an analysis dataset, for cross-checks.
    pub fn dataset_sizes(data: &AnalysisDataset) -> SampleSizes {
        SampleSizes {
            submissions: data.submissions.len(),
            reviewers: data.n_reviewers(),
            pairs: data.n_pairs(),
        }
    }
}

fn fmt_p(p: f64) -> String {
    if p < 0.001 {
        "< 0.001".into()
    } else {
        format!("{p:.3}")
    }
}

fn fmt_ci(ci: Option<Interval>) -> String {
    match ci {
        Some(ci) => format!("[{:.2}, {:.2}]", ci.lo, ci.hi),
        None => "n/a".into(),
    }
}

/// Side-by-side table with one column per report.
pub fn render_table(reports: &[BiasReport]) -> String {
    let headers: Vec<String> = reports
        .iter()
        .map(|r| format!("{} {}", r.venue, r.analysis.as_str()))
        .collect();
    let rows: Vec<(&str, Vec<String>)> = vec![
        ("Test statistic", reports.iter().map(|r| format!("{:.2}", r.statistic)).collect()),
        ("95% CI", reports.iter().map(|r| fmt_ci(r.ci95)).collect()),
        ("P value", reports.iter().map(|r| fmt_p(r.p_two_sided)).collect()),
        (
            "# Submissions",
            reports.iter().map(|r| group_thousands(r.sample_sizes.submissions)).collect(),
        ),
        (
            "# Reviewers",
            reports.iter().map(|r| group_thousands(r.sample_sizes.reviewers)).collect(),
        ),
        (
            "# (Submission, Reviewer) pairs",
            reports.iter().map(|r| group_thousands(r.sample_sizes.pairs)).collect(),
        ),
    ];
    let label_w = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0);
    let col_w: Vec<usize> = (0..reports.len())
        .map(|j| {
            rows.iter()
                .map(|(_, v)| v[j].chars().count())
                .chain(std::iter::once(headers[j].chars().count()))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    out.push_str(&" ".repeat(label_w));
    for (h, w) in headers.iter().zip(&col_w) {
        out.push_str(&format!("  {h:>w$}"));
    }
    out.push('\n');
    for (label, values) in &rows {
        out.push_str(&format!("{label:<label_w$}"));
        for (v, w) in values.iter().zip(&col_w) {
            out.push_str(&format!("  {v:>w$}"));
        }
        out.push('\n');
    }
    let caveats: BTreeSet<&String> = reports.iter().flat_map(|r| &r.caveats).collect();
    for c in caveats {
        out.push_str(&format!("note: {c}\n"));
    }
    out
}

impl fmt::Display for BiasReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_table(std::slice::from_ref(self)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(venue: &str, kind: AnalysisKind, stat: f64, ci: (f64, f64), p: f64, n: (usize, usize, usize)) -> BiasReport {
        BiasReport {
            venue: venue.into(),
            analysis: kind,
            sample_sizes: SampleSizes {
                submissions: n.0,
                reviewers: n.1,
                pairs: n.2,
            },
            statistic: stat,
            ci95: Some(Interval { lo: ci.0, hi: ci.1 }),
            p_two_sided: p,
            caveats: vec![],
        }
    }

    #[test]
    fn renders_reference_layout() {
        let table = render_table(&[
            report("EC", AnalysisKind::Parametric, 0.23, (0.06, 0.40), 0.009, (283, 152, 849)),
            report("ICML", AnalysisKind::Nonparametric, 0.42, (0.10, 0.73), 0.02, (57, 115, 120)),
        ]);
        let lines: Vec<&str> = table.lines().collect();
        assert!(lines[0].contains("EC parametric") && lines[0].contains("ICML non-parametric"));
        assert!(lines[1].starts_with("Test statistic") && lines[1].contains("0.23") && lines[1].contains("0.42"));
        assert!(lines[2].contains("[0.06, 0.40]") && lines[2].contains("[0.10, 0.73]"));
        assert!(lines[3].contains("0.009") && lines[3].contains("0.020"));
        assert!(lines[6].starts_with("# (Submission, Reviewer) pairs") && lines[6].contains("849"));
    }

    #[test]
    fn tiny_p_values() {
        assert_eq!(fmt_p(0.0001), "< 0.001");
        assert_eq!(fmt_p(0.004), "0.004");
    }

    #[test]
    fn statistic_range_is_enforced() {
        let cfg = VenueConfig::ec_like();
        assert!(check_range(&cfg, 4.0).is_ok());
        assert!(check_range(&cfg, -4.5).is_err());
        assert!(check_range(&cfg, f64::NAN).is_err());
    }
}
