//! Profile CSV ingestion and CSV emitters for curves and candidates.

use crate::detect::PeakCandidate;
use crate::error::{Error, Result};
use crate::model::{DecompositionModel, TimeGrid};
use crate::profile::{DemandProfile, HOURS};

pub const DEFAULT_UNIT: &str = "unknown";

/// Numeric precision of emitted files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    /// Six significant digits.
    #[default]
    Significant6,
    /// Shortest representation that reads back to the same `f64`.
    Full,
}

impl Precision {
    pub fn apply(self, v: f64) -> f64 {
        match self {
            Self::Full => v,
            Self::Significant6 if v.is_finite() => format!("{v:.5e}").parse().unwrap_or(v),
            Self::Significant6 => v,
        }
    }

    pub fn apply_opt(self, v: Option<f64>) -> Option<f64> {
        v.map(|x| self.apply(x))
    }

    pub fn format(self, v: f64) -> String {
        format_number(self.apply(v))
    }
}

/// Shortest round-tripping text, in exponent form for very small or large
/// magnitudes.
pub fn format_number(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

/// Parse a daily profile.
///
/// Accepted layouts:
/// - a `hour,flow` table (header optional) with one row per hour 0..=23 in
///   any order; the header may carry the unit as `flow[m3/h]`
/// - a single column of 24 flows in hour order, optionally headed `flow`
///
/// Blank lines and lines starting with `#` are ignored.
pub fn parse_profile_csv(text: &str, label: &str) -> Result<DemandProfile> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());

    let mut unit = DEFAULT_UNIT.to_string();
    let mut columns: Option<usize> = None;
    let mut by_hour: [Option<(f64, u64)>; HOURS] = [None; HOURS];
    let mut ordered: Vec<f64> = Vec::new();
    let mut rows = 0usize;
    let mut first = true;

    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if first {
            first = false;
            if record.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
                unit = parse_header(&record, line)?.unwrap_or(unit);
                columns = Some(record.len());
                continue;
            }
        }
        let width = *columns.get_or_insert(record.len());
        if record.len() != width {
            return Err(Error::Parse {
                line,
                message: format!("expected {width} fields, found {}", record.len()),
            });
        }
        rows += 1;
        match width {
            1 => ordered.push(parse_flow(&record[0], line)?),
            2 => {
                let hour = parse_hour(&record[0], line)?;
                let flow = parse_flow(&record[1], line)?;
                if let Some((_, prev)) = by_hour[hour] {
                    return Err(Error::Parse {
                        line,
                        message: format!("duplicate hour {hour} (first seen on line {prev})"),
                    });
                }
                by_hour[hour] = Some((flow, line));
            }
            n => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected 1 or 2 fields, found {n}"),
                })
            }
        }
    }

    if rows != HOURS {
        return Err(Error::InvalidProfile(format!("expected {HOURS} hours, found {rows}")));
    }
    let values = if columns == Some(1) {
        ordered
    } else {
        by_hour
            .iter()
            .enumerate()
            .map(|(h, v)| {
                v.map(|(flow, _)| flow)
                    .ok_or_else(|| Error::InvalidProfile(format!("missing hour {h}")))
            })
            .collect::<Result<Vec<_>>>()?
    };
    DemandProfile::new(values, unit, label)
}

fn parse_header(record: &csv::StringRecord, line: u64) -> Result<Option<String>> {
    let flow_field = match record.len() {
        1 => &record[0],
        2 => {
            if !record[0].eq_ignore_ascii_case("hour") {
                return Err(Error::Parse {
                    line,
                    message: format!("expected header 'hour,flow', found first column '{}'", &record[0]),
                });
            }
            &record[1]
        }
        n => {
            return Err(Error::Parse {
                line,
                message: format!("expected 1 or 2 header fields, found {n}"),
            })
        }
    };
    let (name, unit) = match flow_field.split_once('[') {
        Some((name, rest)) => {
            let unit = rest.strip_suffix(']').ok_or_else(|| Error::Parse {
                line,
                message: format!("unterminated unit annotation in '{flow_field}'"),
            })?;
            (name.trim(), Some(unit.trim().to_string()))
        }
        None => (flow_field, None),
    };
    if !name.eq_ignore_ascii_case("flow") {
        return Err(Error::Parse {
            line,
            message: format!("expected a 'flow' column, found '{name}'"),
        });
    }
    Ok(unit.filter(|u| !u.is_empty()))
}

fn parse_hour(field: &str, line: u64) -> Result<usize> {
    let hour: usize = field.parse().map_err(|_| Error::Parse {
        line,
        message: format!("field 'hour': invalid hour '{field}'"),
    })?;
    if hour >= HOURS {
        return Err(Error::Parse {
            line,
            message: format!("field 'hour': hour {hour} outside 0..=23"),
        });
    }
    Ok(hour)
}

fn parse_flow(field: &str, line: u64) -> Result<f64> {
    let flow: f64 = field.parse().map_err(|_| Error::Parse {
        line,
        message: format!("field 'flow': invalid number '{field}'"),
    })?;
    if !flow.is_finite() || flow < 0.0 {
        return Err(Error::Parse {
            line,
            message: format!("field 'flow': flow must be finite and >= 0, got {field}"),
        });
    }
    Ok(flow)
}

/// Hourly profile as a `hour,flow[unit]` table.
pub fn emit_profile_csv(profile: &DemandProfile, precision: Precision) -> String {
    let mut out = format!("hour,flow[{}]\n", profile.unit());
    for (h, v) in profile.values().iter().enumerate() {
        out.push_str(&format!("{h},{}\n", precision.format(*v)));
    }
    out
}

/// Baseline, each peak and the total on a 0..=23 grid with the given step.
///
/// The total column is the sum of the emitted baseline and peak columns, so
/// it reconstructs the model from exactly what is written.
pub fn emit_component_curves(model: &DecompositionModel, step: f64, precision: Precision) -> Result<String> {
    let grid = TimeGrid::day(step)?;
    let mut header = vec!["t".to_string(), "baseline".to_string()];
    header.extend((1..=model.n_peaks()).map(|i| format!("peak_{i}")));
    header.push("total".to_string());

    let mut out = header.join(",");
    out.push('\n');
    let baseline = precision.apply(model.baseline());
    for t in grid.points() {
        let peaks: Vec<f64> = model.peaks().iter().map(|p| precision.apply(p.eval(t))).collect();
        let total = baseline + peaks.iter().sum::<f64>();
        let mut row = vec![precision.format(t), format_number(baseline)];
        row.extend(peaks.iter().copied().map(format_number));
        row.push(format_number(total));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn emit_candidates_csv(candidates: &[PeakCandidate], precision: Precision) -> String {
    let mut out = String::from("hour,value,kind\n");
    for c in candidates {
        out.push_str(&format!("{},{},{}\n", c.hour_index, precision.format(c.value), c.kind));
    }
    out
}
