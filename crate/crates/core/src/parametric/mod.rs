//! Within-submission differencing and weighted least squares.
//!
//! For each submission the mean uncited score is subtracted from the mean
//! cited score, which cancels the submission's latent quality. Covariates
//! are differenced the same way. The model
//! `Δscore = α* + Σ αj·Δcovariate_j` is then fit with weights
//! `1 / (1/n_cited + 1/n_uncited)`; it has no intercept besides α*.

mod diagnostics;
mod qr;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::dataset::{covariate_names, VenuePolicy};
use crate::error::{Error, Result, Warning};
use crate::filter::{AnalysisDataset, PairObservation, SubmissionGroup};
use crate::ids::SubmissionId;

pub use diagnostics::{
    diagnostics, qq_points, write_qq_csv, write_residuals_csv, DiagnosticsBundle, QqPoint, ResidualPoint,
};

/// Name of the citation coefficient (the constant of the differenced model).
pub const ALPHA_STAR: &str = "alpha_star";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRow {
    pub submission_id: SubmissionId,
    pub score_delta: f64,
    pub covariate_deltas: BTreeMap<String, f64>,
    pub n_cited: usize,
    pub n_uncited: usize,
    pub weight: f64,
}

/// `mean(a) − mean(b)` as one rounding of an exact-when-integral numerator,
/// so integer shifts applied to both groups leave the result bit-identical.
fn mean_difference(a: impl Iterator<Item = f64>, na: usize, b: impl Iterator<Item = f64>, nb: usize) -> f64 {
    let sa: f64 = a.sum();
    let sb: f64 = b.sum();
    (nb as f64 * sa - na as f64 * sb) / (na as f64 * nb as f64)
}

fn row(group: &SubmissionGroup, names: &[&str]) -> AnalysisRow {
    let (nc, nu) = (group.cited.len(), group.uncited.len());
    let scores = |v: &[PairObservation]| v.iter().map(|o| o.score).collect::<Vec<_>>();
    let score_delta = mean_difference(
        scores(&group.cited).into_iter(),
        nc,
        scores(&group.uncited).into_iter(),
        nu,
    );
    let covariate_deltas = names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let d = mean_difference(
                group.cited.iter().map(|o| o.covariates[j]),
                nc,
                group.uncited.iter().map(|o| o.covariates[j]),
                nu,
            );
            ((*name).to_owned(), d)
        })
        .collect();
    AnalysisRow {
        submission_id: group.submission_id.clone(),
        score_delta,
        covariate_deltas,
        n_cited: nc,
        n_uncited: nu,
        weight: 1.0 / (1.0 / nc as f64 + 1.0 / nu as f64),
    }
}

/// One differenced row per submission. Warns about covariate deltas that
/// are constant across rows (they cannot be separated from α*).
pub fn build_rows(data: &AnalysisDataset) -> Result<(Vec<AnalysisRow>, Vec<Warning>)> {
    let names = covariate_names(data.config.venue_policy);
    for g in &data.submissions {
        if g.cited.is_empty() || g.uncited.is_empty() {
            return Err(Error::Validation(format!(
                "submission {} lacks a cited or an uncited review",
                g.submission_id
            )));
        }
        if let Some(o) = g.cited.iter().chain(&g.uncited).find(|o| o.covariates.len() != names.len()) {
            return Err(Error::Validation(format!(
                "({}, {}) has {} covariates, expected {}",
                g.submission_id,
                o.reviewer_id,
                o.covariates.len(),
                names.len()
            )));
        }
    }
    let rows: Vec<AnalysisRow> = data.submissions.par_iter().map(|g| row(g, names)).collect();
    let mut warnings = Vec::new();
    if let Some(first) = rows.first() {
        for name in names {
            let v = first.covariate_deltas[*name];
            if rows.iter().all(|r| r.covariate_deltas[*name] == v) {
                warnings.push(Warning::new(
                    "rank deficiency",
                    format!("{name} delta is constant ({v}) across all rows"),
                ));
            }
        }
    }
    Ok((rows, warnings))
}

/// Covariate columns of the differenced model; α* is always included.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub covariates: Vec<String>,
}

impl ModelSpec {
    pub fn for_policy(policy: VenuePolicy) -> Self {
        Self {
            covariates: covariate_names(policy).iter().map(|s| (*s).to_owned()).collect(),
        }
    }

    pub fn intercept_only() -> Self {
        Self { covariates: Vec::new() }
    }

    pub fn n_params(&self) -> usize {
        1 + self.covariates.len()
    }

    pub fn column_names(&self) -> Vec<&str> {
        std::iter::once(ALPHA_STAR)
            .chain(self.covariates.iter().map(String::as_str))
            .collect()
    }

    pub(crate) fn design_row(&self, row: &AnalysisRow) -> Result<Vec<f64>> {
        let mut x = Vec::with_capacity(self.n_params());
        x.push(1.0);
        for c in &self.covariates {
            x.push(*row.covariate_deltas.get(c).ok_or_else(|| {
                Error::Validation(format!("row {} has no {c} delta", row.submission_id))
            })?);
        }
        Ok(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    /// Absent when the standard error is 0.
    pub t_stat: Option<f64>,
    pub p_value: f64,
    pub ci95: Interval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub alpha_star: Coefficient,
    pub covariates: Vec<Coefficient>,
    pub sigma0_hat: f64,
    pub df: usize,
    pub n_rows: usize,
    pub model: ModelSpec,
}

impl FitResult {
    pub fn estimates(&self) -> Vec<f64> {
        std::iter::once(&self.alpha_star)
            .chain(&self.covariates)
            .map(|c| c.estimate)
            .collect()
    }

    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        std::iter::once(&self.alpha_star)
            .chain(&self.covariates)
            .find(|c| c.name == name)
    }

    pub(crate) fn predict(&self, row: &AnalysisRow) -> Result<f64> {
        let x = self.model.design_row(row)?;
        Ok(x.iter().zip(self.estimates()).map(|(a, b)| a * b).sum())
    }
}

/// Weighted least squares on the differenced rows, with Student-t
/// inference on df = n − p.
pub fn fit_wls(rows: &[AnalysisRow], model: &ModelSpec) -> Result<FitResult> {
    let n = rows.len();
    let p = model.n_params();
    if n <= p {
        return Err(Error::SampleSize { n, params: p });
    }
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for r in rows {
        if !(r.weight > 0.0) {
            return Err(Error::Validation(format!("row {} has weight {}", r.submission_id, r.weight)));
        }
        let sw = r.weight.sqrt();
        x.push(model.design_row(r)?.into_iter().map(|v| v * sw).collect::<Vec<_>>());
        y.push(r.score_delta * sw);
    }
    let names = model.column_names();
    let qr = qr::Qr::factor(&x, p).map_err(|cols| Error::RankDeficient {
        columns: cols.into_iter().map(|j| names[j].to_owned()).collect(),
    })?;
    let beta = qr.solve(&y);
    let wrss: f64 = x
        .iter()
        .zip(&y)
        .map(|(xi, yi)| {
            let fit: f64 = xi.iter().zip(&beta).map(|(a, b)| a * b).sum();
            (yi - fit).powi(2)
        })
        .sum();
    let df = n - p;
    let sigma2 = wrss / df as f64;
    let rinv_rows = qr.r_inverse_row_norms_sq();
    let t_dist = StudentsT::new(0.0, 1.0, df as f64).expect("df ≥ 1");
    let crit = t_dist.inverse_cdf(0.975);
    let coefs: Vec<Coefficient> = names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let se = (sigma2 * rinv_rows[j]).sqrt();
            let est = beta[j];
            let (t_stat, p_value) = if se > 0.0 {
                let t = est / se;
                (Some(t), (2.0 * t_dist.sf(t.abs())).min(1.0))
            } else {
                (None, if est == 0.0 { 1.0 } else { 0.0 })
            };
            Coefficient {
                name: (*name).to_owned(),
                estimate: est,
                std_error: se,
                t_stat,
                p_value,
                ci95: Interval {
                    lo: est - crit * se,
                    hi: est + crit * se,
                },
            }
        })
        .collect();
    let mut coefs = coefs.into_iter();
    Ok(FitResult {
        alpha_star: coefs.next().unwrap(),
        covariates: coefs.collect(),
        sigma0_hat: sigma2.sqrt(),
        df,
        n_rows: n,
        model: model.clone(),
    })
}
