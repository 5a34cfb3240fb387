//! Skewed Gaussian peaks and the baseline-plus-peaks demand model.

use std::f64::consts::{FRAC_2_SQRT_PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::erf::erfc_with_gaussian;
use crate::error::{Error, Result};

/// One skewed Gaussian peak.
///
/// `amplitude` is the apex value reached at `location` for every skewness,
/// because the erf factor equals one there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakComponent {
    amplitude: f64,
    location: f64,
    width: f64,
    skewness: f64,
}

impl PeakComponent {
    pub fn new(amplitude: f64, location: f64, width: f64, skewness: f64) -> Result<Self> {
        let peak = Self {
            amplitude,
            location,
            width,
            skewness,
        };
        peak.validate()?;
        Ok(peak)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let fields = [self.amplitude, self.location, self.width, self.skewness];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "peak fields must be finite, got {fields:?}"
            )));
        }
        if self.amplitude < 0.0 {
            return Err(Error::InvalidModel(format!(
                "peak amplitude must be >= 0, got {}",
                self.amplitude
            )));
        }
        if self.width <= 0.0 {
            return Err(Error::InvalidModel(format!(
                "peak width must be > 0, got {}",
                self.width
            )));
        }
        Ok(())
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn location(&self) -> f64 {
        self.location
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn skewness(&self) -> f64 {
        self.skewness
    }

    /// Same peak with the skewness forced to zero.
    pub fn symmetric(&self) -> Self {
        Self { skewness: 0.0, ..*self }
    }

    pub fn eval(&self, t: f64) -> f64 {
        shape_value(self.as_array(), t)
    }

    /// Partial derivatives with respect to (amplitude, location, width, skewness).
    pub fn gradient(&self, t: f64) -> [f64; 4] {
        shape_gradient(self.as_array(), t)
    }

    fn as_array(&self) -> [f64; 4] {
        [self.amplitude, self.location, self.width, self.skewness]
    }
}

/// Peak value for raw `[A, mu, sigma, alpha]` without validation.
pub(crate) fn shape_value([amplitude, location, width, skewness]: [f64; 4], t: f64) -> f64 {
    let z = (t - location) / width;
    amplitude * (-0.5 * z * z).exp() * skew_factor(skewness * z / SQRT_2)
}

/// `1 + erf(u)`, written as `erfc(-u)` to keep precision deep in the left tail.
fn skew_factor(u: f64) -> f64 {
    erfc_with_gaussian(-u).0
}

pub(crate) fn shape_gradient(peak: [f64; 4], t: f64) -> [f64; 4] {
    shape_value_and_gradient(peak, t).1
}

/// Value and `[dA, dmu, dsigma, dalpha]` sharing one erfc evaluation.
pub(crate) fn shape_value_and_gradient([amplitude, location, width, skewness]: [f64; 4], t: f64) -> (f64, [f64; 4]) {
    let z = (t - location) / width;
    let u = skewness * z / SQRT_2;
    let gauss = (-0.5 * z * z).exp();
    if gauss == 0.0 {
        return (0.0, [0.0; 4]);
    }
    let (skew_factor, u_gauss) = erfc_with_gaussian(-u);
    let erf_slope = FRAC_2_SQRT_PI * u_gauss;

    let d_amplitude = gauss * skew_factor;
    let d_z = amplitude * gauss * (erf_slope * skewness / SQRT_2 - z * skew_factor);
    let d_location = -d_z / width;
    let d_width = -d_z * z / width;
    let d_skewness = amplitude * gauss * erf_slope * z / SQRT_2;
    (
        amplitude * gauss * skew_factor,
        [d_amplitude, d_location, d_width, d_skewness],
    )
}

pub fn eval_peak(peak: &PeakComponent, t: f64) -> f64 {
    peak.eval(t)
}

pub fn peak_gradient(peak: &PeakComponent, t: f64) -> [f64; 4] {
    peak.gradient(t)
}

/// A constant baseline plus skewed Gaussian peaks, kept in canonical order
/// (ascending location, ties by ascending amplitude).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct DecompositionModel {
    baseline: f64,
    peaks: Vec<PeakComponent>,
    unit: String,
}

#[derive(Serialize, Deserialize)]
struct RawModel {
    baseline: f64,
    peaks: Vec<PeakComponent>,
    unit: String,
}

impl TryFrom<RawModel> for DecompositionModel {
    type Error = Error;

    fn try_from(raw: RawModel) -> Result<Self> {
        Self::new(raw.baseline, raw.peaks, raw.unit)
    }
}

impl From<DecompositionModel> for RawModel {
    fn from(m: DecompositionModel) -> Self {
        Self {
            baseline: m.baseline,
            peaks: m.peaks,
            unit: m.unit,
        }
    }
}

impl DecompositionModel {
    pub fn new(baseline: f64, mut peaks: Vec<PeakComponent>, unit: impl Into<String>) -> Result<Self> {
        if !baseline.is_finite() || baseline < 0.0 {
            return Err(Error::InvalidModel(format!(
                "baseline must be finite and >= 0, got {baseline}"
            )));
        }
        for peak in &peaks {
            peak.validate()?;
        }
        peaks.sort_by(|a, b| {
            a.location
                .total_cmp(&b.location)
                .then(a.amplitude.total_cmp(&b.amplitude))
        });
        Ok(Self {
            baseline,
            peaks,
            unit: unit.into(),
        })
    }

    pub fn baseline(&self) -> f64 {
        self.baseline
    }

    pub fn peaks(&self) -> &[PeakComponent] {
        &self.peaks
    }

    pub fn n_peaks(&self) -> usize {
        self.peaks.len()
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }

    pub fn parameter_count(&self) -> usize {
        4 * self.peaks.len() + 1
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.baseline + self.peaks.iter().map(|p| p.eval(t)).sum::<f64>()
    }

    pub fn sample(&self, grid: &TimeGrid) -> Vec<f64> {
        grid.points().map(|t| self.eval(t)).collect()
    }
}

pub fn eval_model(model: &DecompositionModel, t: f64) -> f64 {
    model.eval(t)
}

pub fn sample_model(model: &DecompositionModel, grid: &TimeGrid) -> Vec<f64> {
    model.sample(grid)
}

/// Evenly spaced evaluation times `start + i * step` for `i in 0..count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    start: f64,
    step: f64,
    count: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self::hourly()
    }
}

impl TimeGrid {
    pub fn new(start: f64, step: f64, count: usize) -> Result<Self> {
        if !start.is_finite() || !step.is_finite() || step <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "grid needs finite start and step > 0, got start={start} step={step}"
            )));
        }
        if count == 0 {
            return Err(Error::InvalidConfig("grid count must be >= 1".into()));
        }
        Ok(Self { start, step, count })
    }

    /// Integer hours 0..=23.
    pub fn hourly() -> Self {
        Self {
            start: 0.0,
            step: 1.0,
            count: 24,
        }
    }

    /// Hours from 0 up to 23 inclusive at the given step, `0 < step <= 1`.
    /// A step that does not divide 23 stops at the last point below 23.
    pub fn day(step: f64) -> Result<Self> {
        if !(step > 0.0 && step <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "day grid step must be in (0, 1], got {step}"
            )));
        }
        let intervals = (23.0 / step + 1e-9).floor();
        Self::new(0.0, step, intervals as usize + 1)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.start + i as f64 * self.step)
    }
}
