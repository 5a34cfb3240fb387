use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use skewdemand_core::{
    compute_metrics, emit_candidates_csv, emit_component_curves, emit_report, fit, fit_both, generate_days,
    parse_profile_csv, parse_report_json, DayScenario, DemandProfile, Error, MetricsReport, NoiseKind, NoiseSpec,
    Precision, ReportDocument, ScenarioFile, TimeGrid,
};

use crate::args::{Command, CompareArgs, DecomposeArgs, GenerateArgs, MetricsArgs, ProfileInput};

#[derive(Debug)]
pub enum Outcome {
    Done,
    NotConverged,
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io { path: PathBuf, source: io::Error },
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Core(e) => write!(f, "{e}"),
            Self::Io { path, source } => write!(f, "{}: {source}", path.display()),
            Self::Usage(msg) => f.write_str(msg),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::Core(e)
    }
}

type CliResult<T> = Result<T, CliError>;

pub fn run(command: Command) -> CliResult<Outcome> {
    match command {
        Command::Decompose(a) => decompose(a),
        Command::Compare(a) => compare(a),
        Command::Generate(a) => generate(a),
        Command::Metrics(a) => metrics(a),
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

fn in_context(path: &Path, e: Error) -> CliError {
    match e {
        Error::Parse { line, message } => CliError::Usage(format!("{}: line {line}: {message}", path.display())),
        other => CliError::Usage(format!("{}: {other}", path.display())),
    }
}

fn load_profile(p: &ProfileInput) -> CliResult<DemandProfile> {
    let text = read(&p.input)?;
    let label = p
        .label
        .clone()
        .or_else(|| p.input.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_default();
    let profile = parse_profile_csv(&text, &label).map_err(|e| in_context(&p.input, e))?;
    Ok(match &p.unit {
        Some(u) => profile.with_unit(u.clone()),
        None => profile,
    })
}

/// `explicit`, else the report path with `suffix` in place of its extension.
fn side_path(explicit: Option<&PathBuf>, report: Option<&PathBuf>, suffix: &str, flag: &str) -> CliResult<PathBuf> {
    if let Some(p) = explicit {
        return Ok(p.clone());
    }
    report
        .map(|r| r.with_extension(suffix))
        .ok_or_else(|| CliError::Usage(format!("{flag} needs a path when the report goes to standard output")))
}

fn decompose(a: DecomposeArgs) -> CliResult<Outcome> {
    let config = a.fit.config();
    config.validate()?;
    let out = a.output.output.as_ref();
    let curves = a
        .emit_curves
        .map(|step| {
            TimeGrid::day(step)?;
            Ok::<_, CliError>((
                step,
                side_path(a.curves_output.as_ref(), out, "curves.csv", "--curves-output")?,
            ))
        })
        .transpose()?;
    let peaks = a
        .emit_peaks
        .then(|| side_path(a.peaks_output.as_ref(), out, "peaks.csv", "--peaks-output"))
        .transpose()?;

    let profile = load_profile(&a.profile)?;
    let report = fit(&profile, &config)?;
    let precision: Precision = a.output.precision.into();
    let doc = ReportDocument::from_fit(&report);
    write(
        out.map(PathBuf::as_path),
        &emit_report(&doc, a.output.format.into(), precision)?,
    )?;
    if let Some((step, path)) = curves {
        write(Some(&path), &emit_component_curves(&report.model, step, precision)?)?;
    }
    if let Some(path) = peaks {
        write(Some(&path), &emit_candidates_csv(&report.candidates, precision))?;
    }
    Ok(if doc.all_converged() {
        Outcome::Done
    } else {
        Outcome::NotConverged
    })
}

fn compare(a: CompareArgs) -> CliResult<Outcome> {
    let config = a.fit.config();
    config.validate()?;
    let profile = load_profile(&a.profile)?;
    let cmp = fit_both(&profile, &config)?;
    let doc = ReportDocument::from_comparison(&cmp);
    let text = emit_report(&doc, a.output.format.into(), a.output.precision.into())?;
    write(a.output.output.as_deref(), &text)?;
    Ok(if doc.all_converged() {
        Outcome::Done
    } else {
        Outcome::NotConverged
    })
}

/// Days and optional noise from a scenario file, or the single fitted day of
/// a report.
fn load_days(path: &Path) -> CliResult<(Vec<DayScenario>, Option<NoiseSpec>, String)> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        let doc = parse_report_json(&text).map_err(|e| in_context(path, e))?;
        let model = doc.fitted_model().map_err(|e| in_context(path, e))?;
        let label = if doc.profile.label.is_empty() {
            "day".to_string()
        } else {
            doc.profile.label.clone()
        };
        return Ok((vec![DayScenario::from_model(label, &model)], None, doc.profile.unit));
    }
    let file = ScenarioFile::parse(&text).map_err(|e| in_context(path, e))?;
    Ok((file.days, file.noise, file.unit))
}

fn generate(a: GenerateArgs) -> CliResult<Outcome> {
    let grid = TimeGrid::day(a.grid_step)?;
    let (days, file_noise, unit) = load_days(&a.input)?;

    let noise = match (a.noise, file_noise) {
        (Some(0.0), _) => None,
        (Some(scale), base) => Some(NoiseSpec {
            kind: a
                .noise_kind
                .map(Into::into)
                .or(base.map(|n| n.kind))
                .unwrap_or(NoiseKind::MultiplicativeGaussian),
            scale,
            seed: a.seed.or(base.map(|n| n.seed)).unwrap_or(0),
        }),
        (None, Some(base)) => Some(NoiseSpec {
            kind: a.noise_kind.map(Into::into).unwrap_or(base.kind),
            seed: a.seed.unwrap_or(base.seed),
            ..base
        }),
        (None, None) => None,
    };
    let week = generate_days(&days, &grid, noise.as_ref())?;

    let precision: Precision = a.precision.into();
    let width = week.days.iter().map(|d| d.components.len()).max().unwrap_or(0);
    let mut out = String::from("day,t");
    if a.components {
        out.push_str(",baseline");
        for i in 1..=width {
            out.push_str(&format!(",peak_{i}"));
        }
        out.push_str(",total\n");
    } else {
        out.push_str(&format!(",flow[{unit}]\n"));
    }
    for day in &week.days {
        for (i, &t) in day.times.iter().enumerate() {
            out.push_str(&format!("{},{}", day.label, precision.format(t)));
            if a.components {
                out.push_str(&format!(",{}", precision.format(day.baseline)));
                for k in 0..width {
                    match day.components.get(k) {
                        Some(c) => out.push_str(&format!(",{}", precision.format(c[i]))),
                        None => out.push(','),
                    }
                }
            }
            out.push_str(&format!(",{}\n", precision.format(day.total[i])));
        }
    }
    write(a.output.as_deref(), &out)?;
    Ok(Outcome::Done)
}

fn metrics(a: MetricsArgs) -> CliResult<Outcome> {
    let observed = load_profile(&ProfileInput {
        input: a.observed.clone(),
        unit: None,
        label: None,
    })?;
    let text = read(&a.predicted)?;
    let predicted = if text.trim_start().starts_with('{') {
        let doc = parse_report_json(&text).map_err(|e| in_context(&a.predicted, e))?;
        doc.fitted_model()
            .map_err(|e| in_context(&a.predicted, e))?
            .sample(&TimeGrid::hourly())
    } else {
        parse_profile_csv(&text, "predicted")
            .map_err(|e| in_context(&a.predicted, e))?
            .values()
            .to_vec()
    };
    let m = compute_metrics(observed.values(), &predicted)?;
    let p: Precision = a.precision.into();
    let rounded = MetricsReport {
        rmse: p.apply(m.rmse),
        rmse_pct_of_mean: p.apply_opt(m.rmse_pct_of_mean),
        mae: p.apply(m.mae),
        mae_pct_of_mean: p.apply_opt(m.mae_pct_of_mean),
        max_abs_error: p.apply(m.max_abs_error),
        r_squared: p.apply_opt(m.r_squared),
    };
    let mut text = serde_json::to_string_pretty(&rounded).map_err(Error::from)?;
    text.push('\n');
    write(a.output.as_deref(), &text)?;
    Ok(Outcome::Done)
}
