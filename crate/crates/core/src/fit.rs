//! Regularized least-squares fitting of the decomposition model.
//!
//! The loss is the hourly mean squared error plus a width penalty
//! `r1_weight * sum (sigma_j - r1)^2` and a skewness penalty
//! `r2 * sum alpha_j^2`. Parameters are laid out as
//! `[baseline, A_1, mu_1, sigma_1, alpha_1, A_2, ...]` and optimized under
//! box bounds from a grid of starting widths and skewnesses.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detect::{detect_peaks_with, DetectOptions, PeakCandidate};
use crate::error::{Error, Result};
use crate::metrics::{compute_metrics, MetricsReport};
use crate::model::{shape_value, shape_value_and_gradient, DecompositionModel, PeakComponent, TimeGrid};
use crate::optim::{minimize_bounded_with, Bounds, SolverSettings};
use crate::profile::{DemandProfile, HOURS};

/// Upper end of the peak-location bound (last hour of the modeled day).
pub const LAST_HOUR: f64 = (HOURS - 1) as f64;

/// Cap on peak count for exhaustive per-peak start combinations (9^n runs).
pub const MAX_COMBINATORIAL_PEAKS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MultiStartMode {
    /// One (sigma, alpha) pair applied to every peak per run.
    #[default]
    Shared,
    /// Every per-peak assignment of grid pairs; only for few peaks.
    PerPeakCombinatorial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    pub r1_width_target: f64,
    pub r1_weight: f64,
    pub r2_skew_weight: f64,
    pub sigma_starts: Vec<f64>,
    pub alpha_starts: Vec<f64>,
    pub sigma_bounds: (f64, f64),
    pub alpha_bounds: (f64, f64),
    pub amplitude_cap_factor: f64,
    pub baseline_cap_percentile: f64,
    pub symmetric: bool,
    pub multistart: MultiStartMode,
    pub min_prominence: Option<f64>,
    pub solver: SolverSettings,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            r1_width_target: 2.0,
            r1_weight: 1.0,
            r2_skew_weight: 0.01,
            sigma_starts: vec![1.0, 2.0, 3.0],
            alpha_starts: vec![-1.0, 0.0, 1.0],
            sigma_bounds: (0.1, 10.0),
            alpha_bounds: (-5.0, 5.0),
            amplitude_cap_factor: 1.2,
            baseline_cap_percentile: 10.0,
            symmetric: false,
            multistart: MultiStartMode::Shared,
            min_prominence: None,
            solver: SolverSettings::default(),
        }
    }
}

impl FitConfig {
    pub fn symmetric() -> Self {
        Self {
            symmetric: true,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        let finite = [
            self.r1_width_target,
            self.r1_weight,
            self.r2_skew_weight,
            self.amplitude_cap_factor,
            self.baseline_cap_percentile,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return bad("regularization and cap settings must be finite".into());
        }
        if self.r2_skew_weight < 0.0 || self.r1_weight < 0.0 {
            return bad("regularization weights must be >= 0".into());
        }
        if !(self.sigma_bounds.0 > 0.0 && self.sigma_bounds.0 <= self.sigma_bounds.1) {
            return bad(format!("sigma bounds {:?} need 0 < lower <= upper", self.sigma_bounds));
        }
        if self.alpha_bounds.0.is_nan() || self.alpha_bounds.1.is_nan() || self.alpha_bounds.0 > self.alpha_bounds.1 {
            return bad(format!("alpha bounds {:?} need lower <= upper", self.alpha_bounds));
        }
        if self.sigma_starts.is_empty() || self.alpha_starts.is_empty() {
            return bad("start lists must be non-empty".into());
        }
        if self
            .sigma_starts
            .iter()
            .chain(&self.alpha_starts)
            .any(|v| !v.is_finite())
        {
            return bad("start values must be finite".into());
        }
        if self.amplitude_cap_factor < 0.0 {
            return bad("amplitude cap factor must be >= 0".into());
        }
        if !(0.0..=100.0).contains(&self.baseline_cap_percentile) {
            return bad("baseline cap percentile must be within [0, 100]".into());
        }
        self.solver.validate()
    }

    /// Alpha starts after applying symmetric mode.
    pub fn effective_alpha_starts(&self) -> Vec<f64> {
        if self.symmetric {
            vec![0.0]
        } else {
            self.alpha_starts.clone()
        }
    }

    pub fn effective_alpha_bounds(&self) -> (f64, f64) {
        if self.symmetric {
            (0.0, 0.0)
        } else {
            self.alpha_bounds
        }
    }

    fn detect_options(&self) -> DetectOptions {
        DetectOptions {
            min_prominence: self.min_prominence,
        }
    }
}

/// Flat parameter vector `[baseline, (A, mu, sigma, alpha) per peak]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterVector(Vec<f64>);

impl ParameterVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() % 4 != 1 {
            return Err(Error::InvalidConfig(format!(
                "parameter vector length {} is not 4n + 1",
                values.len()
            )));
        }
        Ok(Self(values))
    }

    pub fn from_model(model: &DecompositionModel) -> Self {
        let mut v = Vec::with_capacity(model.parameter_count());
        v.push(model.baseline());
        for p in model.peaks() {
            v.extend([p.amplitude(), p.location(), p.width(), p.skewness()]);
        }
        Self(v)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn n_peaks(&self) -> usize {
        self.0.len() / 4
    }

    pub fn baseline(&self) -> f64 {
        self.0[0]
    }

    /// (A, mu, sigma, alpha) of peak `j`.
    pub fn peak(&self, j: usize) -> [f64; 4] {
        let k = 1 + 4 * j;
        [self.0[k], self.0[k + 1], self.0[k + 2], self.0[k + 3]]
    }

    pub fn to_model(&self, unit: &str) -> Result<DecompositionModel> {
        let peaks = (0..self.n_peaks())
            .map(|j| {
                let [a, mu, s, al] = self.peak(j);
                PeakComponent::new(a, mu, s, al)
            })
            .collect::<Result<Vec<_>>>()?;
        DecompositionModel::new(self.baseline(), peaks, unit)
    }
}

/// Percentile with linear interpolation between order statistics.
pub fn percentile(values: &[f64], pct: f64) -> f64 {
    assert!(!values.is_empty(), "percentile of empty slice");
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = pct / 100.0 * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    sorted[lo] + (rank - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn make_bounds(profile: &DemandProfile, n_peaks: usize, config: &FitConfig) -> Result<Bounds> {
    if n_peaks < 1 {
        return Err(Error::InvalidConfig("n_peaks must be >= 1".into()));
    }
    let baseline_cap = percentile(profile.values(), config.baseline_cap_percentile);
    let amplitude_cap = config.amplitude_cap_factor * profile.max();
    let (s_lo, s_hi) = config.sigma_bounds;
    let (a_lo, a_hi) = config.effective_alpha_bounds();

    let mut pairs = Vec::with_capacity(4 * n_peaks + 1);
    pairs.push((0.0, baseline_cap));
    for _ in 0..n_peaks {
        pairs.extend([(0.0, amplitude_cap), (0.0, LAST_HOUR), (s_lo, s_hi), (a_lo, a_hi)]);
    }
    Bounds::from_pairs(&pairs)
}

fn predictions(params: &[f64]) -> [f64; HOURS] {
    let mut out = [params[0]; HOURS];
    for peak in params[1..].chunks_exact(4) {
        let p = [peak[0], peak[1], peak[2], peak[3]];
        for (t, y) in out.iter_mut().enumerate() {
            *y += shape_value(p, t as f64);
        }
    }
    out
}

pub fn loss(params: &ParameterVector, profile: &DemandProfile, config: &FitConfig) -> f64 {
    raw_loss(params.as_slice(), profile.values(), config)
}

fn raw_loss(params: &[f64], observed: &[f64], config: &FitConfig) -> f64 {
    let predicted = predictions(params);
    let mse = observed
        .iter()
        .zip(&predicted)
        .map(|(y, yh)| (y - yh).powi(2))
        .sum::<f64>()
        / HOURS as f64;
    let (mut width_pen, mut skew_pen) = (0.0, 0.0);
    for peak in params[1..].chunks_exact(4) {
        width_pen += (peak[2] - config.r1_width_target).powi(2);
        skew_pen += peak[3] * peak[3];
    }
    mse + config.r1_weight * width_pen + config.r2_skew_weight * skew_pen
}

pub fn loss_gradient(params: &ParameterVector, profile: &DemandProfile, config: &FitConfig) -> Vec<f64> {
    raw_gradient(params.as_slice(), profile.values(), config)
}

fn raw_gradient(params: &[f64], observed: &[f64], config: &FitConfig) -> Vec<f64> {
    raw_loss_and_gradient(params, observed, config).1
}

fn raw_loss_and_gradient(params: &[f64], observed: &[f64], config: &FitConfig) -> (f64, Vec<f64>) {
    let n_peaks = (params.len() - 1) / 4;
    let mut predicted = [params[0]; HOURS];
    let mut partials = vec![[0.0; 4]; n_peaks * HOURS];
    for (j, peak) in params[1..].chunks_exact(4).enumerate() {
        let shape = [peak[0], peak[1], peak[2], peak[3]];
        for (t, y) in predicted.iter_mut().enumerate() {
            let (v, d) = shape_value_and_gradient(shape, t as f64);
            *y += v;
            partials[j * HOURS + t] = d;
        }
    }

    let scale = 2.0 / HOURS as f64;
    let mut sse = 0.0;
    let mut weights = [0.0; HOURS];
    for t in 0..HOURS {
        let r = predicted[t] - observed[t];
        sse += r * r;
        weights[t] = scale * r;
    }

    let mut grad = vec![0.0; params.len()];
    grad[0] = weights.iter().sum();
    let (mut width_pen, mut skew_pen) = (0.0, 0.0);
    for (j, peak) in params[1..].chunks_exact(4).enumerate() {
        let k = 1 + 4 * j;
        for (t, w) in weights.iter().enumerate() {
            let d = &partials[j * HOURS + t];
            for c in 0..4 {
                grad[k + c] += w * d[c];
            }
        }
        let dw = peak[2] - config.r1_width_target;
        width_pen += dw * dw;
        skew_pen += peak[3] * peak[3];
        grad[k + 2] += 2.0 * config.r1_weight * dw;
        grad[k + 3] += 2.0 * config.r2_skew_weight * peak[3];
    }
    let loss = sse / HOURS as f64 + config.r1_weight * width_pen + config.r2_skew_weight * skew_pen;
    (loss, grad)
}

/// Where a multi-start run began.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartPoint {
    /// Shared (sigma, alpha) for every peak.
    Grid { sigma: f64, alpha: f64 },
    /// One (sigma, alpha) per peak, in ascending detected-hour order.
    PerPeak { pairs: Vec<(f64, f64)> },
    /// A supplied parameter vector, e.g. the symmetric solution.
    Warm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartOutcome {
    pub start: StartPoint,
    /// Final loss, `None` when the run hit a non-finite value.
    pub loss: Option<f64>,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub label: String,
    pub model: DecompositionModel,
    pub params: ParameterVector,
    pub metrics: MetricsReport,
    pub loss: f64,
    pub starts_tried: usize,
    pub best_start: StartPoint,
    pub converged: bool,
    pub iterations: usize,
    pub symmetric: bool,
    pub candidates: Vec<PeakCandidate>,
    pub starts: Vec<StartOutcome>,
}

impl FitReport {
    pub fn fitted_series(&self) -> Vec<f64> {
        self.model.sample(&TimeGrid::hourly())
    }
}

pub fn fit(profile: &DemandProfile, config: &FitConfig) -> Result<FitReport> {
    fit_with_warm_starts(profile, config, &[])
}

/// Fit with extra starting vectors tried after the grid starts.
pub fn fit_with_warm_starts(
    profile: &DemandProfile,
    config: &FitConfig,
    warm_starts: &[ParameterVector],
) -> Result<FitReport> {
    config.validate()?;
    let candidates = detect_peaks_with(profile, &config.detect_options());
    if candidates.is_empty() {
        return Err(Error::NoPeaks(profile.label().to_string()));
    }
    let n_peaks = candidates.len();
    let bounds = make_bounds(profile, n_peaks, config)?;

    let mut starts: Vec<(StartPoint, Vec<f64>)> = start_grid(profile, &candidates, &bounds, config)?;
    for warm in warm_starts {
        if warm.as_slice().len() != bounds.len() {
            return Err(Error::InvalidConfig(format!(
                "warm start has {} parameters, expected {}",
                warm.as_slice().len(),
                bounds.len()
            )));
        }
        let mut x = warm.as_slice().to_vec();
        bounds.project(&mut x);
        starts.push((StartPoint::Warm, x));
    }

    let observed = profile.values();
    let runs: Vec<_> = starts
        .par_iter()
        .map(|(_, x0)| {
            minimize_bounded_with(
                |x| raw_loss_and_gradient(x, observed, config),
                x0,
                &bounds,
                &config.solver,
            )
        })
        .collect();

    let mut best: Option<(usize, crate::optim::Minimum)> = None;
    let mut outcomes = Vec::with_capacity(runs.len());
    for (i, ((start, _), run)) in starts.iter().zip(runs).enumerate() {
        match run {
            Ok(m) => {
                outcomes.push(StartOutcome {
                    start: start.clone(),
                    loss: Some(m.f),
                    converged: m.converged,
                    iterations: m.iterations,
                });
                // strict comparison keeps the earliest start on ties
                if best.as_ref().is_none_or(|(_, b)| m.f < b.f) {
                    best = Some((i, m));
                }
            }
            Err(Error::NonFinite { .. }) => outcomes.push(StartOutcome {
                start: start.clone(),
                loss: None,
                converged: false,
                iterations: 0,
            }),
            Err(e) => return Err(e),
        }
    }
    let Some((best_index, best)) = best else {
        return Err(Error::AllStartsFailed(starts.len()));
    };

    let params = ParameterVector::new(best.x)?;
    let model = params.to_model(profile.unit())?;
    let fitted = model.sample(&TimeGrid::hourly());
    let metrics = compute_metrics(observed, &fitted)?;
    Ok(FitReport {
        label: profile.label().to_string(),
        model,
        params,
        metrics,
        loss: best.f,
        starts_tried: starts.len(),
        best_start: starts[best_index].0.clone(),
        converged: best.converged,
        iterations: best.iterations,
        symmetric: config.symmetric,
        candidates,
        starts: outcomes,
    })
}

fn start_grid(
    profile: &DemandProfile,
    candidates: &[PeakCandidate],
    bounds: &Bounds,
    config: &FitConfig,
) -> Result<Vec<(StartPoint, Vec<f64>)>> {
    let mut sigmas = config.sigma_starts.clone();
    let mut alphas = config.effective_alpha_starts();
    sigmas.sort_by(f64::total_cmp);
    alphas.sort_by(f64::total_cmp);
    let pairs: Vec<(f64, f64)> = sigmas
        .iter()
        .flat_map(|&s| alphas.iter().map(move |&a| (s, a)))
        .collect();

    let (b_lo, b_hi) = bounds.get(0);
    let baseline0 = profile.min().clamp(b_lo, b_hi);
    let build = |per_peak: &[(f64, f64)]| -> Vec<f64> {
        let mut x = Vec::with_capacity(bounds.len());
        x.push(baseline0);
        for (c, &(s, a)) in candidates.iter().zip(per_peak) {
            let amplitude = (profile.values()[c.hour_index] - baseline0).max(0.0);
            x.extend([amplitude, c.hour_index as f64, s, a]);
        }
        bounds.project(&mut x);
        x
    };

    let n = candidates.len();
    match config.multistart {
        MultiStartMode::Shared => Ok(pairs
            .iter()
            .map(|&(sigma, alpha)| (StartPoint::Grid { sigma, alpha }, build(&vec![(sigma, alpha); n])))
            .collect()),
        MultiStartMode::PerPeakCombinatorial => {
            if n > MAX_COMBINATORIAL_PEAKS {
                return Err(Error::InvalidConfig(format!(
                    "per-peak combinatorial starts allow at most {MAX_COMBINATORIAL_PEAKS} peaks, detected {n}"
                )));
            }
            let total = pairs.len().pow(n as u32);
            Ok((0..total)
                .map(|mut code| {
                    // first peak varies slowest, matching lexicographic grid order
                    let mut assignment = vec![(0.0, 0.0); n];
                    for slot in assignment.iter_mut().rev() {
                        *slot = pairs[code % pairs.len()];
                        code /= pairs.len();
                    }
                    let x = build(&assignment);
                    (StartPoint::PerPeak { pairs: assignment }, x)
                })
                .collect())
        }
    }
}

/// Skewed fit paired with its symmetric ablation.
#[derive(Debug, Clone, PartialEq)]
pub struct FitComparison {
    pub skewed: FitReport,
    pub symmetric: FitReport,
}

impl FitComparison {
    /// Symmetric RMSE over skewed RMSE; `None` when the skewed RMSE is zero.
    pub fn rmse_ratio(&self) -> Option<f64> {
        let skewed = self.skewed.metrics.rmse;
        (skewed > 0.0).then(|| self.symmetric.metrics.rmse / skewed)
    }
}

/// Symmetric fit first, then the skewed fit with the symmetric optimum added
/// as a warm start, so the skewed loss never exceeds the symmetric one.
pub fn fit_both(profile: &DemandProfile, config: &FitConfig) -> Result<FitComparison> {
    let symmetric_config = FitConfig {
        symmetric: true,
        ..config.clone()
    };
    let skewed_config = FitConfig {
        symmetric: false,
        ..config.clone()
    };
    let symmetric = fit(profile, &symmetric_config)?;
    let skewed = fit_with_warm_starts(profile, &skewed_config, std::slice::from_ref(&symmetric.params))?;
    Ok(FitComparison { skewed, symmetric })
}
