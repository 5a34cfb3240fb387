//! Python bindings: `import skewdemand`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use skewdemand_core as core;

fn value_error(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "PeakComponent", module = "skewdemand", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyPeak(core::PeakComponent);

#[pymethods]
impl PyPeak {
    #[new]
    fn new(amplitude: f64, location: f64, width: f64, skewness: f64) -> PyResult<Self> {
        core::PeakComponent::new(amplitude, location, width, skewness)
            .map(Self)
            .map_err(value_error)
    }

    #[getter]
    fn amplitude(&self) -> f64 {
        self.0.amplitude()
    }

    #[getter]
    fn location(&self) -> f64 {
        self.0.location()
    }

    #[getter]
    fn width(&self) -> f64 {
        self.0.width()
    }

    #[getter]
    fn skewness(&self) -> f64 {
        self.0.skewness()
    }

    fn eval(&self, t: f64) -> f64 {
        self.0.eval(t)
    }

    /// Partial derivatives with respect to (amplitude, location, width, skewness).
    fn gradient(&self, t: f64) -> [f64; 4] {
        self.0.gradient(t)
    }

    fn __repr__(&self) -> String {
        format!(
            "PeakComponent(amplitude={}, location={}, width={}, skewness={})",
            self.0.amplitude(),
            self.0.location(),
            self.0.width(),
            self.0.skewness()
        )
    }
}

#[pyclass(name = "DecompositionModel", module = "skewdemand", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyModel(core::DecompositionModel);

#[pymethods]
impl PyModel {
    #[new]
    #[pyo3(signature = (baseline, peaks, unit = "m3/h"))]
    fn new(baseline: f64, peaks: Vec<PyPeak>, unit: &str) -> PyResult<Self> {
        core::DecompositionModel::new(baseline, peaks.into_iter().map(|p| p.0).collect(), unit)
            .map(Self)
            .map_err(value_error)
    }

    #[getter]
    fn baseline(&self) -> f64 {
        self.0.baseline()
    }

    /// Peaks in ascending location order.
    #[getter]
    fn peaks(&self) -> Vec<PyPeak> {
        self.0.peaks().iter().cloned().map(PyPeak).collect()
    }

    #[getter]
    fn unit(&self) -> String {
        self.0.unit().to_string()
    }

    fn eval(&self, t: f64) -> f64 {
        self.0.eval(t)
    }

    /// Sample from hour 0 to 23 every `step` hours.
    #[pyo3(signature = (step = 1.0))]
    fn sample(&self, step: f64) -> PyResult<Vec<f64>> {
        let grid = core::TimeGrid::day(step).map_err(value_error)?;
        Ok(self.0.sample(&grid))
    }

    /// Baseline, per-peak and total curves as CSV text.
    #[pyo3(signature = (step = 1.0, full_precision = false))]
    fn component_curves(&self, step: f64, full_precision: bool) -> PyResult<String> {
        core::emit_component_curves(&self.0, step, precision(full_precision)).map_err(value_error)
    }

    fn __repr__(&self) -> String {
        format!(
            "DecompositionModel(baseline={}, n_peaks={}, unit={:?})",
            self.0.baseline(),
            self.0.n_peaks(),
            self.0.unit()
        )
    }
}

fn precision(full: bool) -> core::Precision {
    if full {
        core::Precision::Full
    } else {
        core::Precision::Significant6
    }
}

#[pyclass(name = "FitConfig", module = "skewdemand", get_all, set_all, skip_from_py_object)]
#[derive(Clone)]
pub struct PyFitConfig {
    r1_width_target: f64,
    r1_weight: f64,
    r2_skew_weight: f64,
    sigma_starts: Vec<f64>,
    alpha_starts: Vec<f64>,
    sigma_bounds: (f64, f64),
    alpha_bounds: (f64, f64),
    amplitude_cap_factor: f64,
    baseline_cap_percentile: f64,
    symmetric: bool,
    per_peak_combinatorial: bool,
    min_prominence: Option<f64>,
    max_iterations: usize,
    gradient_tolerance: f64,
    history_size: usize,
    function_tolerance: f64,
}

impl From<&core::FitConfig> for PyFitConfig {
    fn from(c: &core::FitConfig) -> Self {
        Self {
            r1_width_target: c.r1_width_target,
            r1_weight: c.r1_weight,
            r2_skew_weight: c.r2_skew_weight,
            sigma_starts: c.sigma_starts.clone(),
            alpha_starts: c.alpha_starts.clone(),
            sigma_bounds: c.sigma_bounds,
            alpha_bounds: c.alpha_bounds,
            amplitude_cap_factor: c.amplitude_cap_factor,
            baseline_cap_percentile: c.baseline_cap_percentile,
            symmetric: c.symmetric,
            per_peak_combinatorial: c.multistart == core::MultiStartMode::PerPeakCombinatorial,
            min_prominence: c.min_prominence,
            max_iterations: c.solver.max_iterations,
            gradient_tolerance: c.solver.gradient_tolerance,
            history_size: c.solver.history_size,
            function_tolerance: c.solver.function_tolerance,
        }
    }
}

impl PyFitConfig {
    fn to_core(&self) -> core::FitConfig {
        core::FitConfig {
            r1_width_target: self.r1_width_target,
            r1_weight: self.r1_weight,
            r2_skew_weight: self.r2_skew_weight,
            sigma_starts: self.sigma_starts.clone(),
            alpha_starts: self.alpha_starts.clone(),
            sigma_bounds: self.sigma_bounds,
            alpha_bounds: self.alpha_bounds,
            amplitude_cap_factor: self.amplitude_cap_factor,
            baseline_cap_percentile: self.baseline_cap_percentile,
            symmetric: self.symmetric,
            multistart: if self.per_peak_combinatorial {
                core::MultiStartMode::PerPeakCombinatorial
            } else {
                core::MultiStartMode::Shared
            },
            min_prominence: self.min_prominence,
            solver: core::SolverSettings {
                max_iterations: self.max_iterations,
                gradient_tolerance: self.gradient_tolerance,
                history_size: self.history_size,
                function_tolerance: self.function_tolerance,
            },
        }
    }
}

#[pymethods]
impl PyFitConfig {
    /// Defaults for every field; keyword arguments override them.
    #[new]
    #[pyo3(signature = (**overrides))]
    fn new(overrides: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let defaults = PyFitConfig::from(&core::FitConfig::default());
        let Some(d) = overrides else {
            return Ok(defaults);
        };
        let cell = Bound::new(d.py(), defaults)?;
        for (k, v) in d.iter() {
            cell.setattr(k.extract::<String>()?.as_str(), v)?;
        }
        let config = cell.borrow().clone();
        Ok(config)
    }

    #[staticmethod]
    fn symmetric_default() -> Self {
        PyFitConfig::from(&core::FitConfig::symmetric())
    }

    fn validate(&self) -> PyResult<()> {
        self.to_core().validate().map_err(value_error)
    }
}

fn metrics_dict<'py>(py: Python<'py>, m: &core::MetricsReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("rmse", m.rmse)?;
    d.set_item("rmse_pct_of_mean", m.rmse_pct_of_mean)?;
    d.set_item("mae", m.mae)?;
    d.set_item("mae_pct_of_mean", m.mae_pct_of_mean)?;
    d.set_item("max_abs_error", m.max_abs_error)?;
    d.set_item("r_squared", m.r_squared)?;
    Ok(d)
}

#[pyclass(name = "FitReport", module = "skewdemand", frozen)]
pub struct PyFitReport(core::FitReport);

#[pymethods]
impl PyFitReport {
    #[getter]
    fn model(&self) -> PyModel {
        PyModel(self.0.model.clone())
    }

    #[getter]
    fn params(&self) -> Vec<f64> {
        self.0.params.as_slice().to_vec()
    }

    #[getter]
    fn loss(&self) -> f64 {
        self.0.loss
    }

    #[getter]
    fn converged(&self) -> bool {
        self.0.converged
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.0.iterations
    }

    #[getter]
    fn starts_tried(&self) -> usize {
        self.0.starts_tried
    }

    #[getter]
    fn symmetric(&self) -> bool {
        self.0.symmetric
    }

    #[getter]
    fn metrics<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        metrics_dict(py, &self.0.metrics)
    }

    fn fitted_series(&self) -> Vec<f64> {
        self.0.fitted_series()
    }

    /// The JSON report document.
    #[pyo3(signature = (full_precision = false))]
    fn to_json(&self, full_precision: bool) -> PyResult<String> {
        let doc = core::ReportDocument::from_fit(&self.0);
        core::emit_report(&doc, core::ReportFormat::Json, precision(full_precision)).map_err(value_error)
    }
}

fn profile(values: Vec<f64>, unit: &str, label: &str) -> PyResult<core::DemandProfile> {
    core::DemandProfile::new(values, unit, label).map_err(value_error)
}

fn config_or_default(config: Option<PyRef<'_, PyFitConfig>>) -> core::FitConfig {
    config.map_or_else(core::FitConfig::default, |c| c.to_core())
}

#[pyfunction]
fn erf(x: f64) -> f64 {
    core::erf(x)
}

#[pyfunction]
fn erfc(x: f64) -> f64 {
    core::erfc(x)
}

/// Peak candidates of a 24-value profile as (hour, value, kind) tuples.
#[pyfunction]
#[pyo3(signature = (values, min_prominence = None))]
fn detect_peaks(values: Vec<f64>, min_prominence: Option<f64>) -> PyResult<Vec<(usize, f64, String)>> {
    let p = profile(values, core::io::DEFAULT_UNIT, "")?;
    let options = core::DetectOptions { min_prominence };
    Ok(core::detect_peaks_with(&p, &options)
        .into_iter()
        .map(|c| (c.hour_index, c.value, c.kind.to_string()))
        .collect())
}

#[pyfunction]
#[pyo3(signature = (values, config = None, unit = "m3/h", label = "profile"))]
fn fit(
    py: Python<'_>,
    values: Vec<f64>,
    config: Option<PyRef<'_, PyFitConfig>>,
    unit: &str,
    label: &str,
) -> PyResult<PyFitReport> {
    let p = profile(values, unit, label)?;
    let config = config_or_default(config);
    py.detach(|| core::fit(&p, &config))
        .map(PyFitReport)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Symmetric and skewed fits; returns (skewed, symmetric).
#[pyfunction]
#[pyo3(signature = (values, config = None, unit = "m3/h", label = "profile"))]
fn fit_both(
    py: Python<'_>,
    values: Vec<f64>,
    config: Option<PyRef<'_, PyFitConfig>>,
    unit: &str,
    label: &str,
) -> PyResult<(PyFitReport, PyFitReport)> {
    let p = profile(values, unit, label)?;
    let config = config_or_default(config);
    let cmp = py
        .detach(|| core::fit_both(&p, &config))
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok((PyFitReport(cmp.skewed), PyFitReport(cmp.symmetric)))
}

#[pyfunction]
fn compute_metrics<'py>(py: Python<'py>, observed: Vec<f64>, predicted: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
    let m = core::compute_metrics(&observed, &predicted).map_err(value_error)?;
    metrics_dict(py, &m)
}

/// Profile values from CSV text.
#[pyfunction]
#[pyo3(signature = (text, label = "profile"))]
fn parse_profile_csv(text: &str, label: &str) -> PyResult<(Vec<f64>, String)> {
    let p = core::parse_profile_csv(text, label).map_err(value_error)?;
    Ok((p.values().to_vec(), p.unit().to_string()))
}

/// Generate every day of a scenario file; returns (label, series) pairs.
#[pyfunction]
#[pyo3(signature = (scenario_text, grid_step = 1.0))]
fn generate(scenario_text: &str, grid_step: f64) -> PyResult<Vec<(String, Vec<f64>)>> {
    let file = core::ScenarioFile::parse(scenario_text).map_err(value_error)?;
    let grid = core::TimeGrid::day(grid_step).map_err(value_error)?;
    let week = core::generate_days(&file.days, &grid, file.noise.as_ref()).map_err(value_error)?;
    Ok(week.days.into_iter().map(|d| (d.label, d.total)).collect())
}

#[pymodule]
fn skewdemand(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPeak>()?;
    m.add_class::<PyModel>()?;
    m.add_class::<PyFitConfig>()?;
    m.add_class::<PyFitReport>()?;
    m.add_function(wrap_pyfunction!(erf, m)?)?;
    m.add_function(wrap_pyfunction!(erfc, m)?)?;
    m.add_function(wrap_pyfunction!(detect_peaks, m)?)?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(fit_both, m)?)?;
    m.add_function(wrap_pyfunction!(compute_metrics, m)?)?;
    m.add_function(wrap_pyfunction!(parse_profile_csv, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    Ok(())
}
