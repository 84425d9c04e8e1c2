//! One-dimensional construction of the auxiliary objective
//! `h = (min_k h_k)**`, where each `h_k` is the Hölder upper model of `f` at
//! a visited point and `h_*` is the model at the minimizer.
//!
//! Everything lives on a uniform grid. Conjugates are brute-force discrete
//! Legendre transforms and the biconjugate is computed as the lower convex
//! hull of the sampled points.

mod certify;

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::problems::{CertReport, ProblemError, ProblemInstance, SmoothnessDescriptor};
use crate::solvers::IterationRecord;

pub use certify::{
    check_agreement, check_growth, check_smoothness_dual, smoothness_reports, SmoothnessReports,
};

pub const DEFAULT_GRID_POINTS: usize = 4001;
/// The default grid spans `x* ± 1.5 D`.
pub const DEFAULT_SPAN: f64 = 1.5;
/// Multiplier `C` in the discretization tolerance `C·δ·(max slope)`.
pub const TOLERANCE_FACTOR: f64 = 4.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvelopeError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid functions are sampled on different grids")]
    GridMismatch,
    #[error("function `{0}` has no finite value")]
    AllInfinite(String),
    #[error("need at least 3 grid points, got {0}")]
    TooFewPoints(usize),
    #[error("upper models need a finite Hölder constant")]
    InfiniteSmoothness,
    #[error("the minimizer anchor must have zero subgradient, got {0}")]
    NonzeroMinimizerSlope(f64),
    #[error("point {x} is {distance} away from the nearest gridpoint (half spacing {half})")]
    OffGrid { x: f64, distance: f64, half: f64 },
    #[error("grid [{lo}, {hi}] does not cover the ball [{ball_lo}, {ball_hi}]")]
    BallNotCovered { lo: f64, hi: f64, ball_lo: f64, ball_hi: f64 },
    #[error("model slopes leave no common dual domain: [{lo}, {hi}]")]
    NoCommonSlope { lo: f64, hi: f64 },
    #[error("envelopes are one-dimensional, got dimension {0}")]
    NotOneDimensional(usize),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

pub type Result<T> = std::result::Result<T, EnvelopeError>;

/// `(x_k, f(x_k), g_k)` with `g_k ∈ ∂f(x_k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint {
    pub x: f64,
    pub f: f64,
    pub g: f64,
}

impl ModelPoint {
    pub fn new(x: f64, f: f64, g: f64) -> Self {
        Self { x, f, g }
    }

    /// Evaluates a one-dimensional instance at `x`, taking the minimum-norm subgradient.
    pub fn from_instance(inst: &ProblemInstance, x: f64) -> Result<Self> {
        require_1d(inst)?;
        Ok(Self::new(x, inst.value(&[x]), inst.subgradient(&[x])[0]))
    }

    /// `(x*, f*, 0)`.
    pub fn minimizer(inst: &ProblemInstance) -> Result<Self> {
        require_1d(inst)?;
        Ok(Self::new(inst.x_star()[0], inst.f_star(), 0.0))
    }
}

fn require_1d(inst: &ProblemInstance) -> Result<()> {
    match inst.dimension() {
        1 => Ok(()),
        n => Err(EnvelopeError::NotOneDimensional(n)),
    }
}

/// Values of a function on a uniform grid; `+∞` entries are allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub origin_tag: String,
}

fn check_grid(grid: &[f64]) -> Result<f64> {
    if grid.len() < 3 {
        return Err(EnvelopeError::TooFewPoints(grid.len()));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(EnvelopeError::InvalidGrid("non-finite gridpoint".into()));
    }
    let delta = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
    if !(delta > 0.0) {
        return Err(EnvelopeError::InvalidGrid("grid must be strictly increasing".into()));
    }
    for (i, w) in grid.windows(2).enumerate() {
        let step = w[1] - w[0];
        if !(step > 0.0) || (step - delta).abs() > 1e-6 * delta {
            return Err(EnvelopeError::InvalidGrid(format!(
                "spacing {step} at index {i} differs from {delta}"
            )));
        }
    }
    Ok(delta)
}

/// `n` equally spaced points from `a` to `b`.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    if n < 3 {
        return Err(EnvelopeError::TooFewPoints(n));
    }
    let delta = (b - a) / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| a + delta * i as f64).collect();
    check_grid(&grid)?;
    Ok(grid)
}

/// `n` (odd) points spanning `center ± half_width`, with `center` itself at
/// index `(n − 1)/2` exactly.
pub fn centered_grid(center: f64, half_width: f64, n: usize) -> Result<Vec<f64>> {
    if n % 2 == 0 {
        return Err(EnvelopeError::InvalidGrid(format!("point count {n} must be odd")));
    }
    if n < 3 {
        return Err(EnvelopeError::TooFewPoints(n));
    }
    let m = (n - 1) / 2;
    let delta = half_width / m as f64;
    let grid: Vec<f64> = (0..n)
        .map(|i| center + delta * (i as f64 - m as f64))
        .collect();
    check_grid(&grid)?;
    Ok(grid)
}

impl GridFunction {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, origin_tag: impl Into<String>) -> Result<Self> {
        check_grid(&grid)?;
        if values.len() != grid.len() {
            return Err(EnvelopeError::InvalidGrid(format!(
                "{} values for {} gridpoints",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| v.is_nan() || *v == f64::NEG_INFINITY) {
            return Err(EnvelopeError::InvalidGrid("values must be real or +inf".into()));
        }
        let finite = values.iter().filter(|v| v.is_finite()).count();
        if finite < 3 {
            return Err(EnvelopeError::TooFewPoints(finite));
        }
        Ok(Self {
            grid,
            values,
            origin_tag: origin_tag.into(),
        })
    }

    pub fn sample(grid: &[f64], origin_tag: impl Into<String>, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid.to_vec(), grid.iter().map(|&x| f(x)).collect(), origin_tag)
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        (self.grid[self.len() - 1] - self.grid[0]) / (self.len() - 1) as f64
    }

    pub fn nearest_index(&self, x: f64) -> usize {
        let t = ((x - self.grid[0]) / self.spacing()).round();
        t.clamp(0.0, (self.len() - 1) as f64) as usize
    }

    /// Forward differences `(F(x_{i+1}) − F(x_i))/δ`.
    pub fn slopes(&self) -> Vec<f64> {
        let delta = self.spacing();
        self.values.windows(2).map(|w| (w[1] - w[0]) / delta).collect()
    }

    /// Largest finite forward-difference slope in absolute value.
    pub fn max_abs_slope(&self) -> f64 {
        self.slopes()
            .into_iter()
            .filter(|s| s.is_finite())
            .fold(0.0, |m, s| m.max(s.abs()))
    }

    fn same_grid(&self, other: &GridFunction) -> bool {
        self.grid == other.grid
    }
}

/// `f_k + g_k(x − x_k) + L/(η+1)·|x − x_k|^{η+1}` sampled on `grid`.
pub fn upper_model(pt: ModelPoint, s: SmoothnessDescriptor, grid: &[f64]) -> Result<GridFunction> {
    if !s.constant.is_finite() {
        return Err(EnvelopeError::InfiniteSmoothness);
    }
    let e = s.exponent + 1.0;
    let c = s.constant / e;
    GridFunction::sample(grid, format!("model@{}", pt.x), |x| {
        pt.f + pt.g * (x - pt.x) + c * (x - pt.x).abs().powf(e)
    })
}

/// Pointwise minimum of functions sharing one grid.
pub fn pointwise_min(models: &[GridFunction]) -> Result<GridFunction> {
    let first = models.first().ok_or(EnvelopeError::TooFewPoints(0))?;
    if models.iter().any(|m| !m.same_grid(first)) {
        return Err(EnvelopeError::GridMismatch);
    }
    let values = (0..first.len())
        .map(|i| models.iter().map(|m| m.values[i]).fold(f64::INFINITY, f64::min))
        .collect();
    GridFunction::new(first.grid.clone(), values, "min")
}

/// Discrete conjugate with the maximizing primal index for each dual point.
fn conjugate_with_argmax(f: &GridFunction, dual_grid: &[f64]) -> Result<(Vec<f64>, Vec<usize>)> {
    let finite: Vec<(usize, f64, f64)> = f
        .grid
        .iter()
        .zip(&f.values)
        .enumerate()
        .filter(|(_, (_, v))| v.is_finite())
        .map(|(i, (&x, &v))| (i, x, v))
        .collect();
    if finite.is_empty() {
        return Err(EnvelopeError::AllInfinite(f.origin_tag.clone()));
    }
    let mut values = Vec::with_capacity(dual_grid.len());
    let mut argmax = Vec::with_capacity(dual_grid.len());
    for &g in dual_grid {
        let (mut best, mut best_i) = (f64::NEG_INFINITY, 0);
        for &(i, x, v) in &finite {
            let val = g * x - v;
            if val > best {
                best = val;
                best_i = i;
            }
        }
        values.push(best);
        argmax.push(best_i);
    }
    Ok((values, argmax))
}

/// `F*(g) = max_i g·x_i − F(x_i)` over the finite gridpoints, for each `g` in `dual_grid`.
pub fn conjugate(f: &GridFunction, dual_grid: &[f64]) -> Result<GridFunction> {
    let (values, _) = conjugate_with_argmax(f, dual_grid)?;
    GridFunction::new(dual_grid.to_vec(), values, format!("conj({})", f.origin_tag))
}

/// Uniform dual grid over `[min slope − 1, max slope + 1]` with the primal point count.
pub fn dual_grid_for(f: &GridFunction) -> Result<Vec<f64>> {
    let slopes: Vec<f64> = f.slopes().into_iter().filter(|s| s.is_finite()).collect();
    let lo = slopes.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() {
        return Err(EnvelopeError::AllInfinite(f.origin_tag.clone()));
    }
    uniform_grid(lo - 1.0, hi + 1.0, f.len())
}

/// Lower convex envelope of the points `(x_i, F(x_i))`: exact at hull
/// vertices, linear in between.
pub fn convex_envelope(f: &GridFunction) -> Result<GridFunction> {
    if f.len() < 3 {
        return Err(EnvelopeError::TooFewPoints(f.len()));
    }
    if let Some(i) = f.values.iter().position(|v| !v.is_finite()) {
        return Err(EnvelopeError::InvalidGrid(format!(
            "convex envelope needs finite values, index {i} is {}",
            f.values[i]
        )));
    }
    let (xs, ys) = (&f.grid, &f.values);
    // monotone chain, lower half
    let mut hull: Vec<usize> = Vec::new();
    for i in 0..xs.len() {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop `a` unless it lies strictly below the chord from o to i
            let lhs = (ys[a] - ys[o]) * (xs[i] - xs[o]);
            let rhs = (ys[i] - ys[o]) * (xs[a] - xs[o]);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let mut values = vec![0.0; xs.len()];
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        values[a] = ys[a];
        let slope = (ys[b] - ys[a]) / (xs[b] - xs[a]);
        for j in a + 1..b {
            values[j] = ys[a] + slope * (xs[j] - xs[a]);
        }
    }
    let last = *hull.last().expect("hull is nonempty");
    values[last] = ys[last];
    GridFunction::new(xs.clone(), values, format!("env({})", f.origin_tag))
}

/// The auxiliary objective together with its ingredients and, once
/// certified, the three certificate reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeResult {
    /// The envelope over the whole line, sampled on the grid.
    pub h: GridFunction,
    /// The envelope of `min_models` restricted to the grid interval. It
    /// coincides with `h` away from the ends and lies above it near them.
    pub grid_hull: GridFunction,
    pub min_models: GridFunction,
    pub models: Vec<GridFunction>,
    /// Visited points followed by the minimizer anchor.
    pub anchors: Vec<ModelPoint>,
    pub x_star: ModelPoint,
    pub descriptor: SmoothnessDescriptor,
    pub agreement: Option<CertReport>,
    pub smoothness: Option<CertReport>,
    pub growth: Option<CertReport>,
}

impl EnvelopeResult {
    pub fn spacing(&self) -> f64 {
        self.h.spacing()
    }

    /// Largest model slope magnitude on the grid, which scales every
    /// discretization error.
    pub fn max_slope(&self) -> f64 {
        self.min_models.max_abs_slope()
    }

    /// `2δ·max|g|`
    pub fn agreement_tolerance(&self) -> f64 {
        2.0 * self.spacing() * self.max_slope()
    }

    /// `C·δ·(max|g| + 1)`
    pub fn discretization_tolerance(&self) -> f64 {
        TOLERANCE_FACTOR * self.spacing() * (self.max_slope() + 1.0)
    }

    /// Writes `x, f, min_models, h` rows.
    pub fn write_csv<W: Write>(&self, inst: &ProblemInstance, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "f", "min_models", "h"])?;
        for i in 0..self.h.len() {
            let x = self.h.grid[i];
            w.write_record([
                x.to_string(),
                inst.value(&[x]).to_string(),
                self.min_models.values[i].to_string(),
                self.h.values[i].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Dual grid resolution relative to the primal grid for `η > 0`.
const DUAL_REFINEMENT: usize = 16;

/// `h(x) = sup_y {xy − max_k h_k*(y)}` at each gridpoint, using the closed
/// form `h_k*(y) = y x_k − f_k + φ*(y − g_k)` of the model conjugates.
///
/// For `η = 0`, `φ*` is the indicator of `[−L, L]`, so `max_k h_k*` is
/// polyhedral on `[max g − L, min g + L]` and the supremum is attained at one
/// of its vertices, which are enumerated exactly. For `η > 0`,
/// `φ*(v) = c|v|^{(η+1)/η}` with `c = η/((η+1)L^{1/η})`, and the supremum is
/// taken over a dense dual grid on `|y| ≤ (W(η+1)/η)^η·L`, `W` the largest
/// distance from `x*` to the grid. Since `h ≥ f*` and `h_*^*` already
/// forces `c|y|^{(η+1)/η} ≤ |y|W` at any maximizer, no maximizer lies outside.
fn whole_line_envelope(anchors: &[ModelPoint], x_star: f64, s: SmoothnessDescriptor, grid: &[f64]) -> Result<Vec<f64>> {
    let (l, eta) = (s.constant, s.exponent);
    if eta == 0.0 {
        let lo = anchors.iter().map(|a| a.g).fold(f64::NEG_INFINITY, f64::max) - l;
        let hi = anchors.iter().map(|a| a.g).fold(f64::INFINITY, f64::min) + l;
        if lo > hi {
            return Err(EnvelopeError::NoCommonSlope { lo, hi });
        }
        let mut ys = vec![lo, hi];
        for (i, a) in anchors.iter().enumerate() {
            for b in &anchors[i + 1..] {
                if a.x != b.x {
                    let y = (a.f - b.f) / (a.x - b.x);
                    if (lo..=hi).contains(&y) {
                        ys.push(y);
                    }
                }
            }
        }
        let conj: Vec<f64> = ys
            .iter()
            .map(|&y| anchors.iter().map(|a| y * a.x - a.f).fold(f64::NEG_INFINITY, f64::max))
            .collect();
        return Ok(grid
            .iter()
            .map(|&x| {
                ys.iter()
                    .zip(&conj)
                    .map(|(y, c)| x * y - c)
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect());
    }
    let c = eta / ((eta + 1.0) * l.powf(1.0 / eta));
    let r = (eta + 1.0) / eta;
    let w = grid
        .iter()
        .map(|x| (x - x_star).abs())
        .fold(0.0, f64::max);
    let bound = 1.01 * (w * (eta + 1.0) / eta).powf(eta) * l;
    let m = DUAL_REFINEMENT * grid.len() + 1;
    let ys: Vec<f64> = (0..m)
        .map(|j| -bound + 2.0 * bound * j as f64 / (m - 1) as f64)
        .collect();
    let conj: Vec<f64> = ys
        .iter()
        .map(|&y| {
            anchors
                .iter()
                .map(|a| y * a.x - a.f + c * (y - a.g).abs().powf(r))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    // y ↦ xy − h*(y) is concave along the dual grid and its maximizer moves
    // right as x grows, so one forward sweep finds every maximum
    let mut j = 0;
    Ok(grid
        .iter()
        .map(|&x| {
            let val = |j: usize| x * ys[j] - conj[j];
            while j + 1 < m && val(j + 1) >= val(j) {
                j += 1;
            }
            val(j)
        })
        .collect())
}

/// Builds `h = (min{h_k : k ∈ points ∪ {*}})**` on `grid`.
pub fn build_auxiliary(
    points: &[ModelPoint],
    x_star_point: ModelPoint,
    s: SmoothnessDescriptor,
    grid: &[f64],
) -> Result<EnvelopeResult> {
    if x_star_point.g != 0.0 {
        return Err(EnvelopeError::NonzeroMinimizerSlope(x_star_point.g));
    }
    let mut anchors = points.to_vec();
    anchors.push(x_star_point);
    let models = anchors
        .iter()
        .map(|&pt| upper_model(pt, s, grid))
        .collect::<Result<Vec<_>>>()?;
    let min_models = pointwise_min(&models)?;
    let grid_hull = convex_envelope(&min_models)?;
    let values = whole_line_envelope(&anchors, x_star_point.x, s, grid)?;
    let h = GridFunction::new(grid.to_vec(), values, "h")?;
    Ok(EnvelopeResult {
        h,
        grid_hull,
        min_models,
        models,
        anchors,
        x_star: x_star_point,
        descriptor: s,
        agreement: None,
        smoothness: None,
        growth: None,
    })
}

/// Default grid for an instance: [`DEFAULT_GRID_POINTS`] points over `x* ± 1.5 D`.
pub fn default_grid(inst: &ProblemInstance, radius: f64) -> Result<Vec<f64>> {
    require_1d(inst)?;
    centered_grid(inst.x_star()[0], DEFAULT_SPAN * radius, DEFAULT_GRID_POINTS)
}

/// Moves each recorded iterate to its nearest gridpoint and re-evaluates
/// `f` and the minimum-norm subgradient there.
pub fn snap_trace(inst: &ProblemInstance, trace: &[IterationRecord], grid: &[f64]) -> Result<Vec<ModelPoint>> {
    require_1d(inst)?;
    let delta = check_grid(grid)?;
    trace
        .iter()
        .map(|r| {
            let i = ((r.x[0] - grid[0]) / delta).round().clamp(0.0, (grid.len() - 1) as f64) as usize;
            ModelPoint::from_instance(inst, grid[i])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::make_power_norm;

    fn grid11() -> Vec<f64> {
        uniform_grid(-1.0, 1.0, 2001).unwrap()
    }

    #[test]
    fn grids() {
        let g = centered_grid(0.3, 1.5, 4001).unwrap();
        assert_eq!(g[2000], 0.3);
        assert!(centered_grid(0.0, 1.0, 4000).is_err());
        assert!(GridFunction::new(vec![0.0, 1.0, 3.0], vec![0.0; 3], "t").is_err());
        assert!(GridFunction::new(vec![0.0, 1.0, 2.0], vec![0.0, f64::INFINITY, 1.0], "t").is_err());
        let f = GridFunction::sample(&g, "t", |x| x).unwrap();
        assert_eq!(f.nearest_index(0.3 + 0.4 * f.spacing()), 2000);
        assert_eq!(f.nearest_index(-100.0), 0);
    }

    #[test]
    fn upper_model_examples() {
        let g = grid11();
        let q = upper_model(ModelPoint::new(0.0, 0.0, 0.0), SmoothnessDescriptor::new(2.0, 1.0).unwrap(), &g)
            .unwrap();
        for (x, v) in g.iter().zip(&q.values) {
            assert!((v - x * x).abs() < 1e-15);
        }
        let pt = ModelPoint::new(1.0, 1.0, 1.0);
        let v = upper_model(pt, SmoothnessDescriptor::new(2.0, 0.0).unwrap(), &g).unwrap();
        for (x, y) in g.iter().zip(&v.values) {
            assert!((y - (1.0 + (x - 1.0) + 2.0 * (x - 1.0).abs())).abs() < 1e-15);
        }
        assert_eq!(v.values[2000], 1.0);
        assert!(upper_model(pt, SmoothnessDescriptor::unstructured(), &g).is_err());
    }

    #[test]
    fn pointwise_min_examples() {
        let g = uniform_grid(-1.0, 3.0, 401).unwrap();
        let a = GridFunction::sample(&g, "a", |x| x * x).unwrap();
        let b = GridFunction::sample(&g, "b", |x| (x - 2.0) * (x - 2.0)).unwrap();
        let m = pointwise_min(&[a.clone(), b.clone()]).unwrap();
        for (i, &x) in g.iter().enumerate() {
            let want = if x <= 1.0 { x * x } else { (x - 2.0) * (x - 2.0) };
            assert_eq!(m.values[i], want);
        }
        assert_eq!(pointwise_min(std::slice::from_ref(&a)).unwrap().values, a.values);
        let big = GridFunction::sample(&g, "big", |x| x * x + 1.0).unwrap();
        assert_eq!(pointwise_min(&[a.clone(), big]).unwrap().values, a.values);
        let other = GridFunction::sample(&uniform_grid(-1.0, 3.0, 403).unwrap(), "c", |x| x).unwrap();
        assert_eq!(pointwise_min(&[a, other]), Err(EnvelopeError::GridMismatch));
    }

    #[test]
    fn conjugate_examples() {
        let g = uniform_grid(-3.0, 3.0, 6001).unwrap();
        let half_sq = GridFunction::sample(&g, "q", |x| 0.5 * x * x).unwrap();
        let c = conjugate(&half_sq, &[1.0, 0.0]).unwrap_err();
        assert!(matches!(c, EnvelopeError::TooFewPoints(2)));
        let c = conjugate(&half_sq, &[0.0, 0.5, 1.0]).unwrap();
        assert!((c.values[2] - 0.5).abs() < 1e-6);

        let g = uniform_grid(-5.0, 5.0, 1001).unwrap();
        let abs = GridFunction::sample(&g, "abs", f64::abs).unwrap();
        let c = conjugate(&abs, &[0.5, 1.25, 2.0]).unwrap();
        assert!(c.values[0].abs() < 1e-12);
        assert!((c.values[2] - 5.0).abs() < 1e-12);

        let aff = GridFunction::sample(&g, "aff", |x| 2.0 * x - 3.0).unwrap();
        let c = conjugate(&aff, &[1.0, 2.0, 3.0]).unwrap();
        assert!((c.values[1] - 3.0).abs() < 1e-12);
        assert!(c.values[0] > 7.0 && c.values[2] > 7.0);

        let inf = GridFunction {
            grid: vec![0.0, 1.0, 2.0],
            values: vec![f64::INFINITY; 3],
            origin_tag: "inf".into(),
        };
        assert!(matches!(conjugate(&inf, &[0.0, 1.0, 2.0]), Err(EnvelopeError::AllInfinite(_))));
    }

    #[test]
    fn envelope_examples() {
        let g = uniform_grid(-1.0, 3.0, 4001).unwrap();
        let sq = GridFunction::sample(&g, "sq", |x| x * x).unwrap();
        let env = convex_envelope(&sq).unwrap();
        for (a, b) in env.values.iter().zip(&sq.values) {
            assert!((a - b).abs() < 1e-12);
        }
        let two = GridFunction::sample(&g, "two", |x| (x * x).min((x - 2.0) * (x - 2.0))).unwrap();
        let env = convex_envelope(&two).unwrap();
        let mid = env.nearest_index(1.0);
        assert!(env.values[mid] < 1.0 - 0.5);
        for (a, b) in env.values.iter().zip(&two.values) {
            assert!(a <= b);
        }
        let again = convex_envelope(&env).unwrap();
        for (a, b) in again.values.iter().zip(&env.values) {
            assert!((a - b).abs() < 1e-12);
        }
        let tiny = GridFunction {
            grid: vec![0.0, 1.0],
            values: vec![0.0, 0.0],
            origin_tag: "tiny".into(),
        };
        assert_eq!(convex_envelope(&tiny), Err(EnvelopeError::TooFewPoints(2)));
    }

    #[test]
    fn auxiliary_examples() {
        let g = centered_grid(0.0, 1.5, 3001).unwrap();
        let s = SmoothnessDescriptor::new(2.0, 1.0).unwrap();
        let res = build_auxiliary(&[], ModelPoint::new(0.0, 0.0, 0.0), s, &g).unwrap();
        let worst = g
            .iter()
            .zip(&res.h.values)
            .map(|(x, v)| (v - x * x).abs())
            .fold(0.0, f64::max);
        // dual-grid sampling error only
        assert!(worst < 1e-8, "{worst}");
        for (x, v) in g.iter().zip(&res.grid_hull.values) {
            assert!((v - x * x).abs() < 1e-12);
        }
        assert_eq!(res.models.len(), 1);

        // |x| models at ±1 plus the minimizer
        let s = SmoothnessDescriptor::new(2.0, 0.0).unwrap();
        let pts = [ModelPoint::new(-1.0, 1.0, -1.0), ModelPoint::new(1.0, 1.0, 1.0)];
        let res = build_auxiliary(&pts, ModelPoint::new(0.0, 0.0, 0.0), s, &g).unwrap();
        for &x in &[-1.0, 0.0, 1.0] {
            let i = res.h.nearest_index(x);
            assert!((res.h.values[i] - x.abs()).abs() < 1e-12);
        }
        for (x, v) in g.iter().zip(&res.h.values) {
            assert!(*v <= x.abs().max(0.0) + 2.0 * (x.abs() - 1.0).max(0.0) + 1e-12);
        }
        assert!(build_auxiliary(&pts, ModelPoint::new(0.0, 0.0, 0.5), s, &g).is_err());
    }

    #[test]
    fn snapping_moves_to_grid_and_reevaluates() {
        let f = make_power_norm(1.0, 2.0, vec![0.0]).unwrap();
        let g = default_grid(&f, 1.0).unwrap();
        let rec = IterationRecord {
            k: 0,
            x: vec![0.40001],
            f: 0.0,
            g: vec![0.0],
            gamma: 0.0,
            candidate: vec![0.0],
            f_candidate: 0.0,
            gap: 0.0,
            dist: 0.0,
            restart_epoch: 0,
        };
        let pts = snap_trace(&f, &[rec], &g).unwrap();
        assert!((pts[0].x - 0.40001).abs() <= 0.5 * (g[1] - g[0]));
        assert!(g.contains(&pts[0].x));
        assert_eq!(pts[0].f, pts[0].x * pts[0].x);
        assert_eq!(pts[0].g, 2.0 * pts[0].x);
    }
}
