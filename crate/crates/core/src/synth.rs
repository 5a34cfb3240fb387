//! Synthetic daily and weekly demand from explicit peak parameters.
//!
//! Scenario files are TOML. Each `[[day]]` table lists its peaks as parallel
//! arrays, one entry per peak:
//!
//! ```toml
//! unit = "m3/h"
//!
//! [[day]]
//! label = "Sunday"
//! baseline = 2
//! hours = [7, 12, 19]
//! amplitudes = [15, 12, 15]
//! sigmas = [3, 4, 2]
//! alphas = [0.1, -0.3, 0.5]
//!
//! [noise]            # optional
//! kind = "multiplicative-gaussian"
//! scale = 0.05
//! seed = 42
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DecompositionModel, PeakComponent, TimeGrid};
use crate::profile::DemandProfile;

pub const DAYS_PER_WEEK: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioPeak {
    pub hour: f64,
    pub amplitude: f64,
    pub width: f64,
    pub skewness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDay", into = "RawDay")]
pub struct DayScenario {
    label: String,
    baseline: f64,
    peaks: Vec<ScenarioPeak>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDay {
    label: String,
    baseline: f64,
    hours: Vec<f64>,
    amplitudes: Vec<f64>,
    sigmas: Vec<f64>,
    alphas: Vec<f64>,
}

impl TryFrom<RawDay> for DayScenario {
    type Error = Error;

    fn try_from(raw: RawDay) -> Result<Self> {
        let n = raw.hours.len();
        if raw.amplitudes.len() != n || raw.sigmas.len() != n || raw.alphas.len() != n {
            return Err(Error::Scenario(format!(
                "day '{}': hours/amplitudes/sigmas/alphas lengths differ ({}, {}, {}, {})",
                raw.label,
                n,
                raw.amplitudes.len(),
                raw.sigmas.len(),
                raw.alphas.len()
            )));
        }
        let peaks = (0..n)
            .map(|i| ScenarioPeak {
                hour: raw.hours[i],
                amplitude: raw.amplitudes[i],
                width: raw.sigmas[i],
                skewness: raw.alphas[i],
            })
            .collect();
        DayScenario::new(raw.label, raw.baseline, peaks)
    }
}

impl From<DayScenario> for RawDay {
    fn from(d: DayScenario) -> Self {
        Self {
            hours: d.peaks.iter().map(|p| p.hour).collect(),
            amplitudes: d.peaks.iter().map(|p| p.amplitude).collect(),
            sigmas: d.peaks.iter().map(|p| p.width).collect(),
            alphas: d.peaks.iter().map(|p| p.skewness).collect(),
            label: d.label,
            baseline: d.baseline,
        }
    }
}

impl DayScenario {
    pub fn new(label: impl Into<String>, baseline: f64, peaks: Vec<ScenarioPeak>) -> Result<Self> {
        let day = Self {
            label: label.into(),
            baseline,
            peaks,
        };
        day.to_model("")
            .map_err(|e| Error::Scenario(format!("day '{}': {e}", day.label)))?;
        Ok(day)
    }

    pub fn from_model(label: impl Into<String>, model: &DecompositionModel) -> Self {
        Self {
            label: label.into(),
            baseline: model.baseline(),
            peaks: model
                .peaks()
                .iter()
                .map(|p| ScenarioPeak {
                    hour: p.location(),
                    amplitude: p.amplitude(),
                    width: p.width(),
                    skewness: p.skewness(),
                })
                .collect(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn baseline(&self) -> f64 {
        self.baseline
    }

    pub fn peaks(&self) -> &[ScenarioPeak] {
        &self.peaks
    }

    pub fn to_model(&self, unit: &str) -> Result<DecompositionModel> {
        let peaks = self
            .peaks
            .iter()
            .map(|p| PeakComponent::new(p.amplitude, p.hour, p.width, p.skewness))
            .collect::<Result<Vec<_>>>()?;
        DecompositionModel::new(self.baseline, peaks, unit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    /// `y * (1 + scale * z)`
    MultiplicativeGaussian,
    /// `y + scale * z`
    AdditiveGaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub scale: f64,
    #[serde(default)]
    pub seed: u64,
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.scale.is_finite() || self.scale < 0.0 {
            return Err(Error::Scenario(format!(
                "noise scale must be finite and >= 0, got {}",
                self.scale
            )));
        }
        Ok(())
    }

    /// Perturb `series` in place, clamping at zero.
    pub fn apply(&self, series: &mut [f64]) {
        if self.scale == 0.0 {
            return;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for y in series.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut rng);
            let noisy = match self.kind {
                NoiseKind::MultiplicativeGaussian => *y * (1.0 + self.scale * z),
                NoiseKind::AdditiveGaussian => *y + self.scale * z,
            };
            *y = noisy.max(0.0);
        }
    }
}

/// Contents of a scenario file: any number of days plus optional noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default = "default_unit")]
    pub unit: String,
    #[serde(rename = "day")]
    pub days: Vec<DayScenario>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSpec>,
}

fn default_unit() -> String {
    "m3/h".to_string()
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: Self = toml::from_str(text)?;
        if file.days.is_empty() {
            return Err(Error::Scenario("scenario has no [[day]] entries".into()));
        }
        if let Some(noise) = &file.noise {
            noise.validate()?;
        }
        Ok(file)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn into_week(self) -> Result<WeekScenario> {
        WeekScenario::new(self.days, self.noise, self.unit)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeekScenario {
    days: Vec<DayScenario>,
    noise: Option<NoiseSpec>,
    unit: String,
}

impl WeekScenario {
    pub fn new(days: Vec<DayScenario>, noise: Option<NoiseSpec>, unit: impl Into<String>) -> Result<Self> {
        if days.len() != DAYS_PER_WEEK {
            return Err(Error::Scenario(format!(
                "a week needs exactly {DAYS_PER_WEEK} days, got {}",
                days.len()
            )));
        }
        if let Some(n) = &noise {
            n.validate()?;
        }
        Ok(Self {
            days,
            noise,
            unit: unit.into(),
        })
    }

    pub fn days(&self) -> &[DayScenario] {
        &self.days
    }

    pub fn noise(&self) -> Option<&NoiseSpec> {
        self.noise.as_ref()
    }

    pub fn with_noise(mut self, noise: Option<NoiseSpec>) -> Result<Self> {
        if let Some(n) = &noise {
            n.validate()?;
        }
        self.noise = noise;
        Ok(self)
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }
}

/// One generated day with its per-component breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedDay {
    pub label: String,
    pub times: Vec<f64>,
    pub baseline: f64,
    /// One series per peak, in canonical (ascending location) order.
    pub components: Vec<Vec<f64>>,
    /// Baseline plus components, with noise applied when requested.
    pub total: Vec<f64>,
}

impl GeneratedDay {
    /// The day as an hourly profile; only valid on the default hourly grid.
    pub fn to_profile(&self, unit: &str) -> Result<DemandProfile> {
        DemandProfile::new(self.total.clone(), unit, self.label.clone())
    }
}

pub fn generate_day(scenario: &DayScenario, grid: &TimeGrid) -> Result<GeneratedDay> {
    let model = scenario.to_model("")?;
    let times: Vec<f64> = grid.points().collect();
    let components: Vec<Vec<f64>> = model
        .peaks()
        .iter()
        .map(|p| times.iter().map(|&t| p.eval(t)).collect())
        .collect();
    let total = times.iter().map(|&t| model.eval(t)).collect();
    Ok(GeneratedDay {
        label: scenario.label.clone(),
        times,
        baseline: model.baseline(),
        components,
        total,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedWeek {
    pub days: Vec<GeneratedDay>,
    /// Day totals concatenated in order.
    pub series: Vec<f64>,
}

pub fn generate_week(scenario: &WeekScenario) -> Result<GeneratedWeek> {
    generate_week_on(scenario, &TimeGrid::hourly())
}

pub fn generate_week_on(scenario: &WeekScenario, grid: &TimeGrid) -> Result<GeneratedWeek> {
    generate_days(&scenario.days, grid, scenario.noise.as_ref())
}

/// Generate consecutive days, each on its own axis, then apply noise over the
/// concatenated series.
pub fn generate_days(days: &[DayScenario], grid: &TimeGrid, noise: Option<&NoiseSpec>) -> Result<GeneratedWeek> {
    let mut generated = days.iter().map(|d| generate_day(d, grid)).collect::<Result<Vec<_>>>()?;
    let mut series: Vec<f64> = generated.iter().flat_map(|d| d.total.iter().copied()).collect();
    if let Some(noise) = noise {
        noise.validate()?;
        noise.apply(&mut series);
        let mut chunks = series.chunks(grid.count());
        for day in &mut generated {
            day.total = chunks.next().expect("one chunk per day").to_vec();
        }
    }
    Ok(GeneratedWeek {
        days: generated,
        series,
    })
}
