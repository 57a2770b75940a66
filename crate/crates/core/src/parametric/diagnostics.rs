use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::{AnalysisRow, FitResult};
use crate::error::{Error, Result};
use crate::ids::SubmissionId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualPoint {
    pub submission_id: SubmissionId,
    pub fitted: f64,
    /// √weight × (observed − fitted).
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QqPoint {
    pub theoretical: f64,
    pub sample: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsBundle {
    pub residuals: Vec<ResidualPoint>,
    /// Weighted residuals scaled by σ̂0 against normal quantiles.
    pub qq: Vec<QqPoint>,
}

/// Normal Q-Q points with plotting positions `(i − a) / (n + 1 − 2a)`,
/// a = 3/8 for n ≤ 10 and 1/2 otherwise.
pub fn qq_points(values: &[f64]) -> Vec<QqPoint> {
    let n = values.len();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let a = if n <= 10 { 0.375 } else { 0.5 };
    let std = Normal::standard();
    sorted
        .into_iter()
        .enumerate()
        .map(|(i, sample)| QqPoint {
            theoretical: std.inverse_cdf((i as f64 + 1.0 - a) / (n as f64 + 1.0 - 2.0 * a)),
            sample,
        })
        .collect()
}

pub fn diagnostics(fit: &FitResult, rows: &[AnalysisRow]) -> Result<DiagnosticsBundle> {
    let residuals = rows
        .iter()
        .map(|r| {
            let fitted = fit.predict(r)?;
            Ok(ResidualPoint {
                submission_id: r.submission_id.clone(),
                fitted,
                residual: r.weight.sqrt() * (r.score_delta - fitted),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let scale = if fit.sigma0_hat > 0.0 { fit.sigma0_hat } else { 1.0 };
    let standardized: Vec<f64> = residuals.iter().map(|r| r.residual / scale).collect();
    Ok(DiagnosticsBundle {
        residuals,
        qq: qq_points(&standardized),
    })
}

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::InvalidArgument(format!("writing csv: {e}"))
}

pub fn write_residuals_csv<W: Write>(w: W, bundle: &DiagnosticsBundle) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in &bundle.residuals {
        wtr.serialize(r).map_err(csv_err)?;
    }
    wtr.flush().map_err(csv_err)
}

pub fn write_qq_csv<W: Write>(w: W, bundle: &DiagnosticsBundle) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for q in &bundle.qq {
        wtr.serialize(q).map_err(csv_err)?;
    }
    wtr.flush().map_err(csv_err)
}
