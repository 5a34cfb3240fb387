//! Limited-memory BFGS with simple bounds.
//!
//! Each iteration follows the classic three phases: a generalized Cauchy
//! point along the projected steepest-descent path, a Newton step on the
//! variables left free at that point (truncated to stay inside the box), and
//! an Armijo backtracking search along the resulting feasible direction.
//!
//! The limited-memory Hessian approximation is materialized densely from the
//! stored correction pairs. Problems here have at most a few dozen variables,
//! so the O(m n^2) rebuild is negligible next to the objective.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector, DVectorView};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSettings {
    pub max_iterations: usize,
    /// Stop once the infinity norm of the projected gradient falls to this.
    pub gradient_tolerance: f64,
    /// Number of correction pairs kept.
    pub history_size: usize,
    /// Relative reduction `(f_k - f_{k+1}) / max(|f_k|, |f_{k+1}|, 1)` at or
    /// below which the run also counts as converged. Zero disables the test.
    pub function_tolerance: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            gradient_tolerance: 1e-8,
            history_size: 10,
            function_tolerance: 0.0,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be >= 1".into()));
        }
        if self.gradient_tolerance.is_nan() || self.gradient_tolerance <= 0.0 {
            return Err(Error::InvalidConfig("gradient_tolerance must be > 0".into()));
        }
        if self.history_size == 0 {
            return Err(Error::InvalidConfig("history_size must be >= 1".into()));
        }
        if self.function_tolerance.is_nan() || self.function_tolerance < 0.0 {
            return Err(Error::InvalidConfig("function_tolerance must be >= 0".into()));
        }
        Ok(())
    }
}

/// Box constraints `lower[i] <= x[i] <= upper[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::InvalidConfig(format!(
                "bound vectors differ in length: {} vs {}",
                lower.len(),
                upper.len()
            )));
        }
        for (i, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if l.is_nan() || u.is_nan() || l > u {
                return Err(Error::InvalidConfig(format!("bad bound {i}: [{l}, {u}]")));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|p| p.0).collect(), pairs.iter().map(|p| p.1).collect())
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn get(&self, i: usize) -> (f64, f64) {
        (self.lower[i], self.upper[i])
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.len()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| *l <= *v && *v <= *u)
    }

    pub fn project(&self, x: &mut [f64]) {
        for (v, (l, u)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*l, *u);
        }
    }

    /// Infinity norm of the projected gradient `P(x - g) - x`.
    pub fn projected_gradient_norm(&self, x: &[f64], g: &[f64]) -> f64 {
        let mut norm = 0.0f64;
        for i in 0..x.len() {
            let pg = if g[i] < 0.0 {
                (x[i] - self.upper[i]).max(g[i])
            } else {
                (x[i] - self.lower[i]).min(g[i])
            };
            norm = norm.max(pg.abs());
        }
        norm
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    ProjectedGradient,
    FunctionTolerance,
    MaxIterations,
    /// No step along the search direction satisfied the sufficient-decrease
    /// test even after resetting the curvature memory.
    LineSearchFailed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub converged: bool,
    pub iterations: usize,
    pub termination: Termination,
    pub projected_gradient_norm: f64,
}

const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;
// relative size of rounding noise tolerated in f by the fallback acceptance
const NOISE: f64 = 1e-10;
// the fallback needs slope(trial) <= 0.8 |slope(0)|
const APPROX_WOLFE: f64 = 0.8;

/// Minimize `objective` over `bounds` starting from `x0` (projected into the
/// box first). `gradient` must return the exact gradient of `objective`.
pub fn minimize_bounded<F, G>(
    objective: F,
    gradient: G,
    x0: &[f64],
    bounds: &Bounds,
    settings: &SolverSettings,
) -> Result<Minimum>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    minimize_bounded_with(|x| (objective(x), gradient(x)), x0, bounds, settings)
}

/// Same as [`minimize_bounded`] for objectives that produce value and
/// gradient together more cheaply than separately.
pub fn minimize_bounded_with<E>(
    value_and_gradient: E,
    x0: &[f64],
    bounds: &Bounds,
    settings: &SolverSettings,
) -> Result<Minimum>
where
    E: Fn(&[f64]) -> (f64, Vec<f64>),
{
    settings.validate()?;
    let n = x0.len();
    if n != bounds.len() {
        return Err(Error::InvalidConfig(format!(
            "start has {n} parameters, bounds have {}",
            bounds.len()
        )));
    }

    let evaluate = |x: &[f64]| -> Result<(f64, Vec<f64>)> {
        let (f, g) = value_and_gradient(x);
        if !f.is_finite() || g.len() != n || g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { point: x.to_vec() });
        }
        Ok((f, g))
    };

    let mut x = x0.to_vec();
    bounds.project(&mut x);
    let (mut f, mut g) = evaluate(&x)?;
    let f_start = f;
    let mut memory: VecDeque<(Vec<f64>, Vec<f64>)> = VecDeque::with_capacity(settings.history_size);
    let mut theta = 1.0;
    let mut iterations = 0;

    let finish = |x: Vec<f64>, f: f64, g: &[f64], iterations, termination| {
        let pg = bounds.projected_gradient_norm(&x, g);
        Minimum {
            converged: matches!(
                termination,
                Termination::ProjectedGradient | Termination::FunctionTolerance
            ),
            x,
            f,
            iterations,
            termination,
            projected_gradient_norm: pg,
        }
    };

    loop {
        if bounds.projected_gradient_norm(&x, &g) <= settings.gradient_tolerance {
            return Ok(finish(x, f, &g, iterations, Termination::ProjectedGradient));
        }
        if iterations >= settings.max_iterations {
            return Ok(finish(x, f, &g, iterations, Termination::MaxIterations));
        }

        let hessian = hessian_approximation(n, theta, &memory);
        let target = search_target(&x, &g, &hessian, bounds);
        let direction: Vec<f64> = target.iter().zip(&x).map(|(t, xi)| t - xi).collect();
        let slope = dot(&g, &direction);

        let step = if slope < 0.0 {
            let initial = if memory.is_empty() {
                (1.0 / norm(&direction)).min(1.0)
            } else {
                1.0
            };
            backtrack(&evaluate, &x, f, f_start, &direction, slope, initial, bounds)?
        } else {
            None
        };

        let Some((x_new, f_new, g_new)) = step else {
            if memory.is_empty() {
                return Ok(finish(x, f, &g, iterations, Termination::LineSearchFailed));
            }
            memory.clear();
            theta = 1.0;
            continue;
        };

        iterations += 1;
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        let yy = dot(&y, &y);
        if sy > f64::EPSILON * yy && sy > 0.0 {
            if memory.len() == settings.history_size {
                memory.pop_front();
            }
            theta = yy / sy;
            memory.push_back((s, y));
        }

        let reduction = (f - f_new) / f.abs().max(f_new.abs()).max(1.0);
        x = x_new;
        f = f_new;
        g = g_new;
        if settings.function_tolerance > 0.0 && reduction <= settings.function_tolerance {
            return Ok(finish(x, f, &g, iterations, Termination::FunctionTolerance));
        }
    }
}

/// Dense BFGS matrix built from `theta * I` and the correction pairs, oldest first.
fn hessian_approximation(n: usize, theta: f64, memory: &VecDeque<(Vec<f64>, Vec<f64>)>) -> DMatrix<f64> {
    let mut b = DMatrix::<f64>::identity(n, n) * theta;
    let mut bs = DVector::<f64>::zeros(n);
    for (s, y) in memory {
        let s = DVectorView::from_slice(s, n);
        let y = DVectorView::from_slice(y, n);
        bs.gemv(1.0, &b, &s, 0.0);
        let sbs = s.dot(&bs);
        let sy = s.dot(&y);
        if sbs <= 0.0 || sy <= 0.0 {
            continue;
        }
        b.ger(1.0 / sy, &y, &y, 1.0);
        b.ger(-1.0 / sbs, &bs, &bs, 1.0);
    }
    b
}

/// Generalized Cauchy point followed by subspace minimization over the
/// variables that remain free. Returns the feasible point the line search aims at.
fn search_target(x: &[f64], g: &[f64], b: &DMatrix<f64>, bounds: &Bounds) -> Vec<f64> {
    let n = x.len();
    let (lower, upper) = (bounds.lower(), bounds.upper());

    let mut breakpoints = vec![f64::INFINITY; n];
    let mut d = DVector::<f64>::zeros(n);
    for i in 0..n {
        breakpoints[i] = if g[i] < 0.0 {
            (x[i] - upper[i]) / g[i]
        } else if g[i] > 0.0 {
            (x[i] - lower[i]) / g[i]
        } else {
            f64::INFINITY
        };
        if breakpoints[i] > 0.0 {
            d[i] = -g[i];
        } else {
            breakpoints[i] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n)
        .filter(|&i| breakpoints[i] > 0.0 && breakpoints[i].is_finite())
        .collect();
    order.sort_by(|&a, &b| breakpoints[a].total_cmp(&breakpoints[b]).then(a.cmp(&b)));

    let gv = DVector::from_column_slice(g);
    let mut cauchy = DVector::from_column_slice(x);
    let x0 = DVector::from_column_slice(x);
    let mut t_prev = 0.0;
    let mut finished = false;

    for &i in &order {
        let z = &cauchy - &x0;
        let bd = b * &d;
        let f1 = gv.dot(&d) + bd.dot(&z);
        let f2 = d.dot(&bd);
        if f1 >= 0.0 {
            finished = true;
            break;
        }
        let dt_min = if f2 > 0.0 { -f1 / f2 } else { f64::INFINITY };
        let dt = breakpoints[i] - t_prev;
        if dt_min < dt {
            cauchy += &d * dt_min;
            finished = true;
            break;
        }
        cauchy += &d * dt;
        cauchy[i] = if d[i] > 0.0 { upper[i] } else { lower[i] };
        d[i] = 0.0;
        t_prev = breakpoints[i];
    }
    if !finished {
        let z = &cauchy - &x0;
        let bd = b * &d;
        let f1 = gv.dot(&d) + bd.dot(&z);
        let f2 = d.dot(&bd);
        if f1 < 0.0 && f2 > 0.0 {
            cauchy += &d * (-f1 / f2);
        }
    }
    for i in 0..n {
        cauchy[i] = cauchy[i].clamp(lower[i], upper[i]);
    }

    let free: Vec<usize> = (0..n)
        .filter(|&i| lower[i] < cauchy[i] && cauchy[i] < upper[i])
        .collect();
    if free.is_empty() {
        return cauchy.iter().copied().collect();
    }

    let reduced_grad = &gv + b * (&cauchy - &x0);
    let k = free.len();
    let b_ff = DMatrix::from_fn(k, k, |r, c| b[(free[r], free[c])]);
    let r_f = DVector::from_fn(k, |r, _| -reduced_grad[free[r]]);
    let Some(chol) = b_ff.cholesky() else {
        return cauchy.iter().copied().collect();
    };
    let du = chol.solve(&r_f);

    let mut alpha = 1.0f64;
    for (r, &i) in free.iter().enumerate() {
        if du[r] > 0.0 {
            alpha = alpha.min((upper[i] - cauchy[i]) / du[r]);
        } else if du[r] < 0.0 {
            alpha = alpha.min((lower[i] - cauchy[i]) / du[r]);
        }
    }
    let mut target: Vec<f64> = cauchy.iter().copied().collect();
    for (r, &i) in free.iter().enumerate() {
        target[i] = (cauchy[i] + alpha * du[r]).clamp(lower[i], upper[i]);
    }
    target
}

type Step = Option<(Vec<f64>, f64, Vec<f64>)>;

/// Backtracking from `initial` until the sufficient-decrease test passes.
///
/// Close to a minimum the predicted decrease drops below the rounding noise of
/// `f`, so a step is also accepted when `f` has not risen beyond that noise
/// (and not above the starting value) while the slope along the direction is
/// still bounded; the gradient stays informative where `f` differences don't.
#[allow(clippy::too_many_arguments)]
fn backtrack<E>(
    evaluate: &E,
    x: &[f64],
    f: f64,
    f_start: f64,
    direction: &[f64],
    slope: f64,
    initial: f64,
    bounds: &Bounds,
) -> Result<Step>
where
    E: Fn(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let noise = NOISE * f.abs();
    let mut lambda = initial;
    for _ in 0..MAX_BACKTRACKS {
        let mut trial: Vec<f64> = x.iter().zip(direction).map(|(xi, di)| xi + lambda * di).collect();
        bounds.project(&mut trial);
        if trial.as_slice() == x {
            return Ok(None);
        }
        let (f_trial, g_trial) = evaluate(&trial)?;
        if f_trial <= f + ARMIJO * lambda * slope {
            return Ok(Some((trial, f_trial, g_trial)));
        }
        if f_trial <= (f + noise).min(f_start) && dot(&g_trial, direction) <= -APPROX_WOLFE * slope {
            return Ok(Some((trial, f_trial, g_trial)));
        }
        // safeguarded quadratic interpolation
        let denom = 2.0 * (f_trial - f - lambda * slope);
        let next = if denom > 0.0 {
            -slope * lambda * lambda / denom
        } else {
            0.5 * lambda
        };
        lambda = next.clamp(0.1 * lambda, 0.5 * lambda);
    }
    Ok(None)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
