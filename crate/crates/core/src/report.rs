//! Fit report documents: JSON for the full report, CSV for the peak table.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{FitComparison, FitReport, StartPoint};
use crate::io::{format_number, Precision};
use crate::metrics::MetricsReport;
use crate::model::{DecompositionModel, PeakComponent};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    /// Peak table only.
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub profile: ProfileInfo,
    pub model: ModelSection,
    pub metrics: MetricsReport,
    pub solver: SolverSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetric: Option<VariantSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ComparisonSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileInfo {
    pub label: String,
    pub unit: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSection {
    pub n_peaks: usize,
    pub baseline: f64,
    pub peaks: Vec<PeakRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakRow {
    pub amplitude: f64,
    pub location: f64,
    pub width: f64,
    pub skewness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSection {
    pub loss: f64,
    pub converged: bool,
    pub iterations: usize,
    pub starts_tried: usize,
    pub best_start: StartPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantSection {
    pub model: ModelSection,
    pub metrics: MetricsReport,
    pub solver: SolverSection,
}

/// Symmetric minus skewed, field by field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSection {
    pub rmse_ratio: Option<f64>,
    pub rmse_delta: f64,
    pub rmse_pct_of_mean_delta: Option<f64>,
    pub mae_delta: f64,
    pub mae_pct_of_mean_delta: Option<f64>,
    pub max_abs_error_delta: f64,
    pub r_squared_delta: Option<f64>,
    pub loss_delta: f64,
    pub skewed_loss_not_above_symmetric: bool,
    pub symmetric_converged: bool,
}

impl ModelSection {
    pub fn from_model(model: &DecompositionModel) -> Self {
        Self {
            n_peaks: model.n_peaks(),
            baseline: model.baseline(),
            peaks: model
                .peaks()
                .iter()
                .map(|p| PeakRow {
                    amplitude: p.amplitude(),
                    location: p.location(),
                    width: p.width(),
                    skewness: p.skewness(),
                })
                .collect(),
        }
    }

    pub fn to_model(&self, unit: &str) -> Result<DecompositionModel> {
        if self.n_peaks != self.peaks.len() {
            return Err(Error::Format(format!(
                "n_peaks is {} but {} peak rows are present",
                self.n_peaks,
                self.peaks.len()
            )));
        }
        let peaks = self
            .peaks
            .iter()
            .map(|r| PeakComponent::new(r.amplitude, r.location, r.width, r.skewness))
            .collect::<Result<Vec<_>>>()?;
        DecompositionModel::new(self.baseline, peaks, unit)
    }

    fn rounded(&self, p: Precision) -> Self {
        Self {
            n_peaks: self.n_peaks,
            baseline: p.apply(self.baseline),
            peaks: self
                .peaks
                .iter()
                .map(|r| PeakRow {
                    amplitude: p.apply(r.amplitude),
                    location: p.apply(r.location),
                    width: p.apply(r.width),
                    skewness: p.apply(r.skewness),
                })
                .collect(),
        }
    }
}

impl SolverSection {
    fn from_fit(r: &FitReport) -> Self {
        Self {
            loss: r.loss,
            converged: r.converged,
            iterations: r.iterations,
            starts_tried: r.starts_tried,
            best_start: r.best_start.clone(),
        }
    }

    fn rounded(&self, p: Precision) -> Self {
        let best_start = match &self.best_start {
            StartPoint::Grid { sigma, alpha } => StartPoint::Grid {
                sigma: p.apply(*sigma),
                alpha: p.apply(*alpha),
            },
            StartPoint::PerPeak { pairs } => StartPoint::PerPeak {
                pairs: pairs.iter().map(|(s, a)| (p.apply(*s), p.apply(*a))).collect(),
            },
            StartPoint::Warm => StartPoint::Warm,
        };
        Self {
            loss: p.apply(self.loss),
            best_start,
            ..self.clone()
        }
    }
}

fn round_metrics(m: &MetricsReport, p: Precision) -> MetricsReport {
    MetricsReport {
        rmse: p.apply(m.rmse),
        rmse_pct_of_mean: p.apply_opt(m.rmse_pct_of_mean),
        mae: p.apply(m.mae),
        mae_pct_of_mean: p.apply_opt(m.mae_pct_of_mean),
        max_abs_error: p.apply(m.max_abs_error),
        r_squared: p.apply_opt(m.r_squared),
    }
}

fn opt_delta(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    Some(a? - b?)
}

impl ReportDocument {
    pub fn from_fit(report: &FitReport) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            profile: ProfileInfo {
                label: report.label.clone(),
                unit: report.model.unit().to_string(),
            },
            model: ModelSection::from_model(&report.model),
            metrics: report.metrics,
            solver: SolverSection::from_fit(report),
            symmetric: None,
            comparison: None,
        }
    }

    pub fn from_comparison(cmp: &FitComparison) -> Self {
        let (sk, sy) = (&cmp.skewed, &cmp.symmetric);
        let mut doc = Self::from_fit(sk);
        doc.symmetric = Some(VariantSection {
            model: ModelSection::from_model(&sy.model),
            metrics: sy.metrics,
            solver: SolverSection::from_fit(sy),
        });
        doc.comparison = Some(ComparisonSection {
            rmse_ratio: cmp.rmse_ratio(),
            rmse_delta: sy.metrics.rmse - sk.metrics.rmse,
            rmse_pct_of_mean_delta: opt_delta(sy.metrics.rmse_pct_of_mean, sk.metrics.rmse_pct_of_mean),
            mae_delta: sy.metrics.mae - sk.metrics.mae,
            mae_pct_of_mean_delta: opt_delta(sy.metrics.mae_pct_of_mean, sk.metrics.mae_pct_of_mean),
            max_abs_error_delta: sy.metrics.max_abs_error - sk.metrics.max_abs_error,
            r_squared_delta: opt_delta(sy.metrics.r_squared, sk.metrics.r_squared),
            loss_delta: sy.loss - sk.loss,
            skewed_loss_not_above_symmetric: sk.loss <= sy.loss,
            symmetric_converged: sy.converged,
        });
        doc
    }

    /// Every converged flag in the document.
    pub fn all_converged(&self) -> bool {
        self.solver.converged && self.symmetric.as_ref().is_none_or(|s| s.solver.converged)
    }

    pub fn rounded(&self, p: Precision) -> Self {
        Self {
            schema_version: self.schema_version,
            profile: self.profile.clone(),
            model: self.model.rounded(p),
            metrics: round_metrics(&self.metrics, p),
            solver: self.solver.rounded(p),
            symmetric: self.symmetric.as_ref().map(|s| VariantSection {
                model: s.model.rounded(p),
                metrics: round_metrics(&s.metrics, p),
                solver: s.solver.rounded(p),
            }),
            comparison: self.comparison.as_ref().map(|c| ComparisonSection {
                rmse_ratio: p.apply_opt(c.rmse_ratio),
                rmse_delta: p.apply(c.rmse_delta),
                rmse_pct_of_mean_delta: p.apply_opt(c.rmse_pct_of_mean_delta),
                mae_delta: p.apply(c.mae_delta),
                mae_pct_of_mean_delta: p.apply_opt(c.mae_pct_of_mean_delta),
                max_abs_error_delta: p.apply(c.max_abs_error_delta),
                r_squared_delta: p.apply_opt(c.r_squared_delta),
                loss_delta: p.apply(c.loss_delta),
                ..c.clone()
            }),
        }
    }

    pub fn fitted_model(&self) -> Result<DecompositionModel> {
        self.model.to_model(&self.profile.unit)
    }
}

pub fn emit_report(doc: &ReportDocument, format: ReportFormat, precision: Precision) -> Result<String> {
    let doc = doc.rounded(precision);
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(&doc)?;
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Csv => {
            let mut s = String::from("peak,amplitude,location,width,skewness\n");
            for (i, r) in doc.model.peaks.iter().enumerate() {
                let cols = [r.amplitude, r.location, r.width, r.skewness].map(format_number);
                s.push_str(&format!("{},{}\n", i + 1, cols.join(",")));
            }
            Ok(s)
        }
    }
}

pub fn parse_report_json(text: &str) -> Result<ReportDocument> {
    let doc: ReportDocument = serde_json::from_str(text)?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(Error::Format(format!(
            "unsupported report schema_version {} (expected {SCHEMA_VERSION})",
            doc.schema_version
        )));
    }
    Ok(doc)
}
