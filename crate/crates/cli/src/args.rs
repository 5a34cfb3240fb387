use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use skewdemand_core::{FitConfig, MultiStartMode, NoiseKind, Precision, ReportFormat, SolverSettings};

/// Decompose 24-hour water-demand profiles into a constant baseline plus
/// skewed Gaussian peaks, and generate synthetic profiles from peak tables.
///
/// Exit status: 0 on success, 1 on invalid input or configuration, 2 when a
/// fit did not converge (results are still written and flagged).
#[derive(Debug, Parser)]
#[command(name = "skewdemand", version, about, long_about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect peaks, fit the model and report parameters and metrics.
    Decompose(DecomposeArgs),
    /// Fit skewed and symmetric models and report them side by side.
    Compare(CompareArgs),
    /// Generate demand series from a scenario file or a fit report.
    Generate(GenerateArgs),
    /// Compare an observed profile with a predicted profile or a fit report.
    Metrics(MetricsArgs),
}

#[derive(Debug, Args)]
pub struct ProfileInput {
    /// Profile CSV: `hour,flow` rows (any order) or a single column of 24 flows.
    pub input: PathBuf,

    /// Flow unit; overrides a `flow[unit]` header annotation.
    #[arg(long)]
    pub unit: Option<String>,

    /// Profile label [default: input file stem]
    #[arg(long)]
    pub label: Option<String>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Report path [default: standard output]
    #[arg(short, long)]
    pub output: Option<PathBuf>,

    /// Report format; csv writes the peak table only.
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,

    /// Numeric precision of every written file.
    #[arg(long, value_enum, default_value_t = PrecisionArg::Six)]
    pub precision: PrecisionArg,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub profile: ProfileInput,

    #[command(flatten)]
    pub output: OutputArgs,

    /// Write baseline, per-peak and total curves sampled every STEP hours (0 < STEP <= 1).
    #[arg(long, value_name = "STEP")]
    pub emit_curves: Option<f64>,

    /// Curves path [default: <output>.curves.csv]
    #[arg(long, requires = "emit_curves")]
    pub curves_output: Option<PathBuf>,

    /// Write the detected peak candidates.
    #[arg(long)]
    pub emit_peaks: bool,

    /// Candidates path [default: <output>.peaks.csv]
    #[arg(long, requires = "emit_peaks")]
    pub peaks_output: Option<PathBuf>,

    #[command(flatten)]
    pub fit: FitArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub profile: ProfileInput,

    #[command(flatten)]
    pub output: OutputArgs,

    #[command(flatten)]
    pub fit: FitArgs,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Freeze every skewness at 0 (symmetric Gaussian peaks).
    #[arg(long)]
    pub symmetric: bool,

    /// Try every per-peak assignment of (sigma, alpha) starts instead of one
    /// shared pair per run; 9^n runs, at most 3 peaks.
    #[arg(long)]
    pub per_peak_combinatorial: bool,

    /// Drop plateau candidates rising less than this above both neighbours [default: keep all]
    #[arg(long, value_name = "FLOW")]
    pub min_prominence: Option<f64>,

    /// Target peak width of the width penalty, in hours.
    #[arg(long, default_value_t = 2.0)]
    pub r1_width_target: f64,

    /// Weight of the width penalty.
    #[arg(long, default_value_t = 1.0)]
    pub r1_weight: f64,

    /// Weight of the skewness penalty.
    #[arg(long, default_value_t = 0.01)]
    pub r2_skew_weight: f64,

    /// Starting widths, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [1.0, 2.0, 3.0])]
    pub sigma_starts: Vec<f64>,

    /// Starting skewnesses, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-1.0, 0.0, 1.0])]
    pub alpha_starts: Vec<f64>,

    /// Lower width bound, hours.
    #[arg(long, default_value_t = 0.1)]
    pub sigma_min: f64,

    /// Upper width bound, hours.
    #[arg(long, default_value_t = 10.0)]
    pub sigma_max: f64,

    /// Lower skewness bound.
    #[arg(long, allow_negative_numbers = true, default_value_t = -5.0)]
    pub alpha_min: f64,

    /// Upper skewness bound.
    #[arg(long, allow_negative_numbers = true, default_value_t = 5.0)]
    pub alpha_max: f64,

    /// Amplitude upper bound as a multiple of the profile maximum.
    #[arg(long, default_value_t = 1.2)]
    pub amplitude_cap_factor: f64,

    /// Baseline upper bound as this percentile of the profile.
    #[arg(long, default_value_t = 10.0)]
    pub baseline_cap_percentile: f64,

    /// Iteration limit per start.
    #[arg(long, default_value_t = 500)]
    pub max_iterations: usize,

    /// Converged once the projected gradient's largest entry is at most this.
    #[arg(long, default_value_t = 1e-8)]
    pub gradient_tolerance: f64,

    /// Quasi-Newton correction pairs kept.
    #[arg(long, default_value_t = 10)]
    pub history_size: usize,

    /// Also converged once the relative loss decrease is at most this (0 disables).
    #[arg(long, default_value_t = 0.0)]
    pub function_tolerance: f64,
}

impl FitArgs {
    pub fn config(&self) -> FitConfig {
        FitConfig {
            r1_width_target: self.r1_width_target,
            r1_weight: self.r1_weight,
            r2_skew_weight: self.r2_skew_weight,
            sigma_starts: self.sigma_starts.clone(),
            alpha_starts: self.alpha_starts.clone(),
            sigma_bounds: (self.sigma_min, self.sigma_max),
            alpha_bounds: (self.alpha_min, self.alpha_max),
            amplitude_cap_factor: self.amplitude_cap_factor,
            baseline_cap_percentile: self.baseline_cap_percentile,
            symmetric: self.symmetric,
            multistart: if self.per_peak_combinatorial {
                MultiStartMode::PerPeakCombinatorial
            } else {
                MultiStartMode::Shared
            },
            min_prominence: self.min_prominence,
            solver: SolverSettings {
                max_iterations: self.max_iterations,
                gradient_tolerance: self.gradient_tolerance,
                history_size: self.history_size,
                function_tolerance: self.function_tolerance,
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Scenario file (TOML `[[day]]` tables) or a JSON fit report.
    pub input: PathBuf,

    /// Series path [default: standard output]
    #[arg(short, long)]
    pub output: Option<PathBuf>,

    /// Sampling step in hours (0 < STEP <= 1); each day runs from 0 to 23.
    #[arg(long, default_value_t = 1.0)]
    pub grid_step: f64,

    /// Add baseline and per-peak columns.
    #[arg(long)]
    pub components: bool,

    /// Noise scale; 0 turns noise off [default: the scenario's [noise] table, else off]
    #[arg(long)]
    pub noise: Option<f64>,

    /// Noise model [default: the scenario's, else multiplicative]
    #[arg(long, value_enum)]
    pub noise_kind: Option<NoiseKindArg>,

    /// Noise seed [default: the scenario's, else 0]
    #[arg(long)]
    pub seed: Option<u64>,

    /// Numeric precision of the written series.
    #[arg(long, value_enum, default_value_t = PrecisionArg::Six)]
    pub precision: PrecisionArg,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// Observed profile CSV.
    pub observed: PathBuf,

    /// Predicted profile CSV or a JSON fit report whose model is sampled hourly.
    pub predicted: PathBuf,

    /// Metrics path [default: standard output]
    #[arg(short, long)]
    pub output: Option<PathBuf>,

    /// Numeric precision of the written metrics.
    #[arg(long, value_enum, default_value_t = PrecisionArg::Six)]
    pub precision: PrecisionArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrecisionArg {
    /// Six significant digits.
    #[value(name = "6")]
    Six,
    /// Shortest round-tripping representation.
    Full,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Six => Precision::Significant6,
            PrecisionArg::Full => Precision::Full,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseKindArg {
    /// flow * (1 + scale * z)
    Multiplicative,
    /// flow + scale * z
    Additive,
}

impl From<NoiseKindArg> for NoiseKind {
    fn from(k: NoiseKindArg) -> Self {
        match k {
            NoiseKindArg::Multiplicative => NoiseKind::MultiplicativeGaussian,
            NoiseKindArg::Additive => NoiseKind::AdditiveGaussian,
        }
    }
}
