use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reconstruction error metrics in the units of the observed series.
///
/// `r_squared` is absent for a constant observed series and the percentage
/// fields are absent when the observed mean is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub rmse: f64,
    pub rmse_pct_of_mean: Option<f64>,
    pub mae: f64,
    pub mae_pct_of_mean: Option<f64>,
    pub max_abs_error: f64,
    pub r_squared: Option<f64>,
}

pub fn compute_metrics(observed: &[f64], predicted: &[f64]) -> Result<MetricsReport> {
    if observed.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            observed: observed.len(),
            predicted: predicted.len(),
        });
    }
    if observed.len() < 2 {
        return Err(Error::InvalidProfile(format!(
            "metrics need at least 2 points, got {}",
            observed.len()
        )));
    }
    if observed.iter().chain(predicted).any(|v| !v.is_finite()) {
        return Err(Error::InvalidProfile("metrics need finite values".into()));
    }

    let n = observed.len() as f64;
    let mean = observed.iter().sum::<f64>() / n;
    let (mut ss_res, mut abs_sum, mut max_abs, mut ss_tot) = (0.0, 0.0, 0.0f64, 0.0);
    for (y, yh) in observed.iter().zip(predicted) {
        let e = y - yh;
        ss_res += e * e;
        abs_sum += e.abs();
        max_abs = max_abs.max(e.abs());
        ss_tot += (y - mean) * (y - mean);
    }
    let rmse = (ss_res / n).sqrt();
    let mae = abs_sum / n;
    let pct = |v: f64| (mean != 0.0).then(|| 100.0 * v / mean);
    Ok(MetricsReport {
        rmse,
        rmse_pct_of_mean: pct(rmse),
        mae,
        mae_pct_of_mean: pct(mae),
        max_abs_error: max_abs,
        r_squared: (ss_tot > 0.0).then(|| 1.0 - ss_res / ss_tot),
    })
}
