//! Decomposition of daily water-demand profiles into a constant baseline
//! plus skewed Gaussian peaks.
//!
//! The pipeline is: [`detect_peaks`] finds candidate peak hours in a
//! 24-hour [`DemandProfile`], [`fit`] optimizes the baseline and per-peak
//! amplitude, location, width and skewness under box bounds from a grid of
//! starting points, and [`compute_metrics`] scores the reconstruction.
//! [`fit_both`] pairs a skewed fit with its symmetric (zero-skew) ablation.
//! The [`synth`] module runs the model forward to build synthetic daily and
//! weekly patterns from parameter tables.
//!
//! ```
//! use skewdemand_core::{fit, DemandProfile, FitConfig, PeakComponent, DecompositionModel, TimeGrid};
//!
//! let truth = DecompositionModel::new(
//!     3.0,
//!     vec![PeakComponent::new(10.0, 8.0, 2.0, 1.0).unwrap()],
//!     "m3/h",
//! ).unwrap();
//! let profile = DemandProfile::new(truth.sample(&TimeGrid::hourly()), "m3/h", "demo").unwrap();
//! let report = fit(&profile, &FitConfig::default()).unwrap();
//! assert_eq!(report.model.n_peaks(), 1);
//! assert!(report.metrics.r_squared.unwrap() > 0.99);
//! ```

pub mod detect;
pub mod erf;
pub mod error;
pub mod fit;
pub mod io;
pub mod metrics;
pub mod model;
pub mod optim;
pub mod profile;
pub mod report;
pub mod synth;

pub use detect::{detect_peaks, detect_peaks_with, CandidateKind, DetectOptions, PeakCandidate};
pub use erf::{erf, erfc};
pub use error::{Error, Result};
pub use fit::{
    fit, fit_both, fit_with_warm_starts, loss, loss_gradient, make_bounds, percentile, FitComparison, FitConfig,
    FitReport, MultiStartMode, ParameterVector, StartOutcome, StartPoint,
};
pub use io::{emit_candidates_csv, emit_component_curves, emit_profile_csv, parse_profile_csv, Precision};
pub use metrics::{compute_metrics, MetricsReport};
pub use model::{eval_model, eval_peak, peak_gradient, sample_model, DecompositionModel, PeakComponent, TimeGrid};
pub use optim::{minimize_bounded, minimize_bounded_with, Bounds, Minimum, SolverSettings, Termination};
pub use profile::{DemandProfile, HOURS};
pub use report::{emit_report, parse_report_json, ReportDocument, ReportFormat};
pub use synth::{
    generate_day, generate_days, generate_week, generate_week_on, DayScenario, GeneratedDay, GeneratedWeek, NoiseKind,
    NoiseSpec, ScenarioFile, WeekScenario,
};
