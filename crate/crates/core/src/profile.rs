use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of hourly observations in a daily profile.
pub const HOURS: usize = 24;

/// One day of hourly flow observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandProfile {
    values: Vec<f64>,
    unit: String,
    label: String,
}

impl DemandProfile {
    pub fn new(values: Vec<f64>, unit: impl Into<String>, label: impl Into<String>) -> Result<Self> {
        if values.len() != HOURS {
            return Err(Error::InvalidProfile(format!(
                "expected {HOURS} hours, found {}",
                values.len()
            )));
        }
        if let Some((hour, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidProfile(format!(
                "hour {hour}: flow must be finite and >= 0, got {v}"
            )));
        }
        Ok(Self {
            values,
            unit: unit.into(),
            label: label.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_unit(mut self, unit: impl Into<String>) -> Self {
        self.unit = unit.into();
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / HOURS as f64
    }

    /// Profile with the hour order reversed.
    pub fn reversed(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self {
            values,
            unit: self.unit.clone(),
            label: self.label.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_length_and_sign() {
        assert!(DemandProfile::new(vec![1.0; 24], "m3/h", "x").is_ok());
        let err = DemandProfile::new(vec![1.0; 23], "m3/h", "x").unwrap_err();
        assert!(err.to_string().contains("expected 24 hours, found 23"));
        let mut v = vec![1.0; 24];
        v[5] = -0.1;
        assert!(DemandProfile::new(v.clone(), "m3/h", "x").is_err());
        v[5] = f64::NAN;
        assert!(DemandProfile::new(v, "m3/h", "x").is_err());
    }
}
