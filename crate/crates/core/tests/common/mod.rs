//! Reference implementations written independently of the library code.
#![allow(dead_code)]

pub mod corpus;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use skewdemand_core::{DecompositionModel, DemandProfile, PeakComponent, TimeGrid};

const QUAD_STEP: f64 = 5e-4;

/// erf by composite Simpson quadrature of 2/sqrt(pi) * exp(-t^2) on [0, |x|].
pub fn erf_quadrature(x: f64) -> f64 {
    let a = x.abs();
    if a == 0.0 {
        return 0.0;
    }
    let mut panels = (a / QUAD_STEP).ceil() as usize;
    panels += panels % 2;
    let h = a / panels as f64;
    let f = |t: f64| (-t * t).exp();
    let mut odd = 0.0;
    let mut even = 0.0;
    for k in 1..panels {
        let v = f(k as f64 * h);
        if k % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    let integral = h / 3.0 * (f(0.0) + 4.0 * odd + 2.0 * even + f(a));
    let value = 2.0 / std::f64::consts::PI.sqrt() * integral;
    value.copysign(x)
}

/// Skewed peak evaluated straight from its definition.
pub fn peak_direct(t: f64, a: f64, mu: f64, sigma: f64, alpha: f64, erf: impl Fn(f64) -> f64) -> f64 {
    let z = (t - mu) / sigma;
    a * (-0.5 * z * z).exp() * (1.0 + erf(alpha * z / std::f64::consts::SQRT_2))
}

pub struct NaiveMetrics {
    pub rmse: f64,
    pub rmse_pct: Option<f64>,
    pub mae: f64,
    pub mae_pct: Option<f64>,
    pub max_abs: f64,
    pub r2: Option<f64>,
}

/// One pass per statistic, plain summation.
pub fn naive_metrics(y: &[f64], yh: &[f64]) -> NaiveMetrics {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let sq: f64 = (0..y.len()).map(|i| (y[i] - yh[i]) * (y[i] - yh[i])).sum();
    let abs: f64 = (0..y.len()).map(|i| (y[i] - yh[i]).abs()).sum();
    let max_abs = (0..y.len()).map(|i| (y[i] - yh[i]).abs()).fold(0.0, f64::max);
    let tot: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    let rmse = (sq / n).sqrt();
    let mae = abs / n;
    NaiveMetrics {
        rmse,
        rmse_pct: if mean != 0.0 { Some(rmse / mean * 100.0) } else { None },
        mae,
        mae_pct: if mean != 0.0 { Some(mae / mean * 100.0) } else { None },
        max_abs,
        r2: if tot > 0.0 { Some(1.0 - sq / tot) } else { None },
    }
}

/// Hourly MSE plus width and skewness penalties, from the formula.
pub fn loss_direct(params: &[f64], y: &[f64], r1: f64, r1_weight: f64, r2: f64) -> f64 {
    let peaks: Vec<&[f64]> = params[1..].chunks(4).collect();
    let mut sse = 0.0;
    for (t, obs) in y.iter().enumerate() {
        let mut pred = params[0];
        for p in &peaks {
            pred += peak_direct(t as f64, p[0], p[1], p[2], p[3], skewdemand_core::erf);
        }
        sse += (obs - pred).powi(2);
    }
    let mut pen = 0.0;
    for p in &peaks {
        pen += r1_weight * (p[2] - r1).powi(2) + r2 * p[3] * p[3];
    }
    sse / y.len() as f64 + pen
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random model with 1..=max_peaks well-separated-ish peaks inside the day.
pub fn random_model(rng: &mut ChaCha8Rng, max_peaks: usize) -> DecompositionModel {
    let n = rng.random_range(1..=max_peaks);
    let peaks = (0..n)
        .map(|_| {
            PeakComponent::new(
                rng.random_range(2.0..40.0),
                rng.random_range(2.0..21.0),
                rng.random_range(0.8..4.0),
                rng.random_range(-3.0..3.0),
            )
            .unwrap()
        })
        .collect();
    DecompositionModel::new(rng.random_range(0.5..10.0), peaks, "m3/h").unwrap()
}

pub fn profile_of(model: &DecompositionModel, label: &str) -> DemandProfile {
    DemandProfile::new(model.sample(&TimeGrid::hourly()), model.unit(), label).unwrap()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Coarse grid over the box, then compass search with step halving from
/// the best few grid cells. Slow and derivative-free, so it shares nothing
/// with the library solver.
pub fn grid_refine(f: impl Fn(&[f64]) -> f64, lower: &[f64], upper: &[f64], grid: &[usize]) -> (Vec<f64>, f64) {
    const KEEP: usize = 12;
    let n = lower.len();
    let mut cells: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let x: Vec<f64> = (0..n)
            .map(|i| {
                if grid[i] <= 1 {
                    0.5 * (lower[i] + upper[i])
                } else {
                    lower[i] + (upper[i] - lower[i]) * idx[i] as f64 / (grid[i] - 1) as f64
                }
            })
            .collect();
        cells.push((f(&x), x));
        if cells.len() > 4 * KEEP {
            cells.sort_by(|a, b| a.0.total_cmp(&b.0));
            cells.truncate(KEEP);
        }
        let mut k = 0;
        while k < n {
            idx[k] += 1;
            if idx[k] < grid[k].max(1) {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
    }
    cells.sort_by(|a, b| a.0.total_cmp(&b.0));
    cells.truncate(KEEP);

    let mut best: Option<(Vec<f64>, f64)> = None;
    for (mut fx, mut x) in cells {
        let mut step: Vec<f64> = (0..n).map(|i| (upper[i] - lower[i]) / grid[i].max(2) as f64).collect();
        while step.iter().any(|&s| s > 1e-11) {
            let mut improved = false;
            for i in 0..n {
                for sign in [1.0, -1.0] {
                    let mut y = x.clone();
                    y[i] = (y[i] + sign * step[i]).clamp(lower[i], upper[i]);
                    let v = f(&y);
                    if v < fx {
                        fx = v;
                        x = y;
                        improved = true;
                    }
                }
            }
            if !improved {
                step.iter_mut().for_each(|s| *s *= 0.5);
            }
        }
        if best.as_ref().is_none_or(|b| fx < b.1) {
            best = Some((x, fx));
        }
    }
    best.unwrap()
}
