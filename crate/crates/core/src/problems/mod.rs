//! Convex test objectives exposed through a first-order oracle.
//!
//! Every [`ProblemInstance`] knows its minimizer, optimal value, a Hölder
//! smoothness descriptor and (when one exists) a Hölder growth descriptor.
//! Two families are provided: power norms `α‖x − x*‖^p` and pointwise maxima
//! of affine functions. Instances are immutable once built.

mod spec;
mod verify;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{dist, dot, min_norm_in_hull, norm, sub};

pub use spec::{ProblemKind, ProblemSpec};
pub use verify::{sample_ball, verify_growth, verify_smoothness, CertReport, Witness};
pub(crate) use verify::Worst;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("x_star is not a minimizer (min-norm subgradient has norm {residual:e})")]
    NotAMinimizer { residual: f64 },
    #[error("prox is not supported for this instance: {0}")]
    UnsupportedProx(String),
}

pub type Result<T> = std::result::Result<T, ProblemError>;

/// `(L, η)`-Hölder smoothness: `‖g − g′‖ ≤ L‖x − x′‖^η` for all subgradients.
///
/// `(∞, 0)` is the "no structure assumed" sentinel. An infinite constant
/// serializes as `null`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessDescriptor {
    #[serde(rename = "L", with = "inf_as_null")]
    pub constant: f64,
    #[serde(rename = "eta")]
    pub exponent: f64,
}

impl SmoothnessDescriptor {
    pub fn new(constant: f64, exponent: f64) -> Result<Self> {
        let desc = Self { constant, exponent };
        desc.validate()?;
        Ok(desc)
    }

    pub fn unstructured() -> Self {
        Self {
            constant: f64::INFINITY,
            exponent: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.exponent) {
            return Err(ProblemError::InvalidParameter(format!(
                "Hölder exponent eta = {} outside [0, 1]",
                self.exponent
            )));
        }
        if self.constant.is_nan() || self.constant <= 0.0 {
            return Err(ProblemError::InvalidParameter(format!(
                "Hölder constant L = {} must be positive",
                self.constant
            )));
        }
        if self.constant.is_infinite() && self.exponent != 0.0 {
            return Err(ProblemError::InvalidParameter(
                "L = ∞ is only meaningful with eta = 0".into(),
            ));
        }
        Ok(())
    }
}

/// `(α, p)`-Hölder growth: `f(x) ≥ f(x*) + α‖x − x*‖^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthDescriptor {
    #[serde(rename = "alpha")]
    pub modulus: f64,
    #[serde(rename = "p")]
    pub exponent: f64,
}

impl GrowthDescriptor {
    pub fn new(modulus: f64, exponent: f64) -> Result<Self> {
        if !(modulus.is_finite() && modulus > 0.0) {
            return Err(ProblemError::InvalidParameter(format!(
                "growth modulus alpha = {modulus} must be positive"
            )));
        }
        if !(exponent.is_finite() && exponent >= 1.0) {
            return Err(ProblemError::InvalidParameter(format!(
                "growth exponent p = {exponent} must be at least 1"
            )));
        }
        Ok(Self { modulus, exponent })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    /// `α‖x − x*‖^p`
    PowerNorm { alpha: f64, p: f64 },
    /// `max_i ⟨slope_i, x⟩ + offset_i`
    PiecewiseMax {
        slopes: Vec<Vec<f64>>,
        offsets: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    objective: Objective,
    x_star: Vec<f64>,
    f_star: f64,
    smoothness: SmoothnessDescriptor,
    growth: Option<GrowthDescriptor>,
    /// `sup ‖g‖` over the growth-radius ball (the "L-Lipschitz" constant).
    lipschitz_f: f64,
    radius: f64,
}

const DEFAULT_RADIUS: f64 = 1.0;
const HOLDER_SAMPLE_PAIRS: usize = 10_000;
const HOLDER_INFLATION: f64 = 1.05;
const HOLDER_SEED: u64 = 0x5eed_0f40_1de5;
const PROX_BISECTION_STEPS: usize = 200;

/// Canonical tight instance of `(α, p)` growth, `f(x) = α‖x − x*‖^p`.
///
/// Smoothness is `(2α, 0)` for `p = 1` and `(2α, 1)` for `p = 2`. For
/// `1 < p < 2` the constant for exponent `p − 1` is estimated from sampled
/// pairs and inflated by 5%. For `p > 2` the gradient is only locally
/// Lipschitz and the constant is the Hessian bound `αp(p−1)D^{p−2}` on the
/// growth-radius ball.
pub fn make_power_norm(alpha: f64, p: f64, x_star: Vec<f64>) -> Result<ProblemInstance> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(ProblemError::InvalidParameter(format!(
            "alpha = {alpha} must be positive"
        )));
    }
    if !(p.is_finite() && p >= 1.0) {
        return Err(ProblemError::InvalidParameter(format!(
            "p = {p} must be at least 1 (smaller exponents are nonconvex)"
        )));
    }
    check_point(&x_star)?;
    let mut inst = ProblemInstance {
        objective: Objective::PowerNorm { alpha, p },
        x_star,
        f_star: 0.0,
        smoothness: SmoothnessDescriptor::unstructured(),
        growth: Some(GrowthDescriptor::new(alpha, p)?),
        lipschitz_f: f64::INFINITY,
        radius: DEFAULT_RADIUS,
    };
    if p > 1.0 && p < 2.0 {
        let constant = inst.estimate_holder_constant(p - 1.0);
        inst.smoothness = SmoothnessDescriptor::new(constant, p - 1.0)?;
    }
    inst.refresh_radius_constants();
    Ok(inst)
}

/// `f(x) = max_i ⟨slope_i, x⟩ + offset_i`, which must attain its minimum at `x_star`.
///
/// The growth descriptor is sharp, `(α, 1)`, with `α` the smallest
/// directional derivative at `x_star` over unit directions; it is omitted when
/// that slope is zero (a flat or unbounded-direction minimum).
pub fn make_piecewise_max(
    slopes: Vec<Vec<f64>>,
    offsets: Vec<f64>,
    x_star: Vec<f64>,
) -> Result<ProblemInstance> {
    check_point(&x_star)?;
    let n = x_star.len();
    if slopes.is_empty() {
        return Err(ProblemError::InvalidParameter("no affine pieces".into()));
    }
    if slopes.len() != offsets.len() {
        return Err(ProblemError::InvalidParameter(format!(
            "{} slopes but {} offsets",
            slopes.len(),
            offsets.len()
        )));
    }
    for s in &slopes {
        if s.len() != n {
            return Err(ProblemError::DimensionMismatch {
                expected: n,
                got: s.len(),
            });
        }
        check_point(s)?;
    }
    if offsets.iter().any(|b| !b.is_finite()) {
        return Err(ProblemError::InvalidParameter("non-finite offset".into()));
    }

    let max_norm = slopes.iter().map(|s| norm(s)).fold(0.0, f64::max);
    let mut inst = ProblemInstance {
        objective: Objective::PiecewiseMax { slopes, offsets },
        x_star,
        f_star: 0.0,
        smoothness: SmoothnessDescriptor::unstructured(),
        growth: None,
        lipschitz_f: max_norm,
        radius: DEFAULT_RADIUS,
    };
    inst.f_star = inst.value(&inst.x_star);
    let g_star = inst.subgradient(&inst.x_star);
    let residual = norm(&g_star);
    if residual > 1e-9 * max_norm.max(1.0) {
        return Err(ProblemError::NotAMinimizer { residual });
    }
    if max_norm > 0.0 {
        inst.smoothness = SmoothnessDescriptor::new(2.0 * max_norm, 0.0)?;
    }
    let active = inst.active_slopes(&inst.x_star);
    let modulus = sharp_modulus(&active, n);
    if modulus > 1e-12 {
        inst.growth = Some(GrowthDescriptor::new(modulus, 1.0)?);
    }
    Ok(inst)
}

/// `f(x) = max_i ⟨slope_i, x − x*⟩`: every piece is active at `x_star`.
pub fn make_polyhedral_norm(slopes: Vec<Vec<f64>>, x_star: Vec<f64>) -> Result<ProblemInstance> {
    let offsets = slopes.iter().map(|s| -dot(s, &x_star)).collect();
    make_piecewise_max(slopes, offsets, x_star)
}

fn check_point(x: &[f64]) -> Result<()> {
    if x.is_empty() {
        return Err(ProblemError::InvalidParameter("empty point".into()));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(ProblemError::InvalidParameter("non-finite coordinate".into()));
    }
    Ok(())
}

impl ProblemInstance {
    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn dimension(&self) -> usize {
        self.x_star.len()
    }

    pub fn x_star(&self) -> &[f64] {
        &self.x_star
    }

    pub fn f_star(&self) -> f64 {
        self.f_star
    }

    pub fn smoothness(&self) -> SmoothnessDescriptor {
        self.smoothness
    }

    pub fn growth(&self) -> Option<GrowthDescriptor> {
        self.growth
    }

    /// Bound on subgradient norms over `B(x*, D)`; infinite if unbounded.
    pub fn lipschitz_f(&self) -> f64 {
        self.lipschitz_f
    }

    pub fn growth_radius(&self) -> f64 {
        self.radius
    }

    /// Sets the radius `D` of the ball on which radius-dependent constants are
    /// stated (the subgradient bound for `p > 1`, smoothness for `p > 2`).
    pub fn with_growth_radius(mut self, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(ProblemError::InvalidParameter(format!(
                "growth radius D = {radius} must be positive"
            )));
        }
        self.radius = radius;
        self.refresh_radius_constants();
        Ok(self)
    }

    pub fn has_prox(&self) -> bool {
        match &self.objective {
            Objective::PowerNorm { .. } => true,
            Objective::PiecewiseMax { .. } => self.dimension() == 1,
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.value(x))
    }

    /// Minimum-norm element of `∂f(x)`.
    pub fn subgrad(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(self.subgradient(x))
    }

    /// `argmin_z f(z) + ‖z − x‖² / (2ρ)`.
    pub fn prox(&self, x: &[f64], rho: f64) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        if !(rho.is_finite() && rho > 0.0) {
            return Err(ProblemError::InvalidParameter(format!(
                "prox parameter rho = {rho} must be positive"
            )));
        }
        match &self.objective {
            Objective::PowerNorm { alpha, p } => Ok(self.power_norm_prox(x, rho, *alpha, *p)),
            Objective::PiecewiseMax { slopes, offsets } => {
                if self.dimension() != 1 {
                    return Err(ProblemError::UnsupportedProx(format!(
                        "piecewise max in dimension {} is neither radial nor separable",
                        self.dimension()
                    )));
                }
                Ok(vec![piecewise_max_prox_1d(slopes, offsets, x[0], rho)])
            }
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension() {
            return Err(ProblemError::DimensionMismatch {
                expected: self.dimension(),
                got: x.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn value(&self, x: &[f64]) -> f64 {
        match &self.objective {
            Objective::PowerNorm { alpha, p } => alpha * dist(x, &self.x_star).powf(*p),
            Objective::PiecewiseMax { slopes, offsets } => slopes
                .iter()
                .zip(offsets)
                .map(|(a, b)| dot(a, x) + b)
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    pub(crate) fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        match &self.objective {
            Objective::PowerNorm { alpha, p } => {
                let d = sub(x, &self.x_star);
                let r = norm(&d);
                if r == 0.0 {
                    return vec![0.0; d.len()];
                }
                let coeff = alpha * p * r.powf(p - 2.0);
                d.iter().map(|v| coeff * v).collect()
            }
            Objective::PiecewiseMax { .. } => min_norm_in_hull(&self.active_slopes(x)),
        }
    }

    /// Slopes of all pieces attaining the max at `x`, up to rounding.
    fn active_slopes(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let Objective::PiecewiseMax { slopes, offsets } = &self.objective else {
            unreachable!("active slopes requested for a non-polyhedral objective");
        };
        let mut scale: f64 = 0.0;
        let vals: Vec<f64> = slopes
            .iter()
            .zip(offsets)
            .map(|(a, b)| {
                let ax = dot(a, x);
                scale = scale.max(ax.abs() + b.abs());
                ax + b
            })
            .collect();
        let top = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let tie = 8.0 * f64::EPSILON * scale;
        slopes
            .iter()
            .zip(&vals)
            .filter(|(_, &v)| v >= top - tie)
            .map(|(a, _)| a.clone())
            .collect()
    }

    fn power_norm_prox(&self, x: &[f64], rho: f64, alpha: f64, p: f64) -> Vec<f64> {
        let d = sub(x, &self.x_star);
        let r = norm(&d);
        if r == 0.0 {
            return self.x_star.clone();
        }
        // radial profile: minimize α t^p + (r − t)² / (2ρ) over t ∈ [0, r]
        let t = if p == 1.0 {
            (r - rho * alpha).max(0.0)
        } else if p == 2.0 {
            r / (1.0 + 2.0 * rho * alpha)
        } else {
            let (mut lo, mut hi) = (0.0, r);
            for _ in 0..PROX_BISECTION_STEPS {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let slope = alpha * p * mid.powf(p - 1.0) + (mid - r) / rho;
                if slope > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        };
        if d.len() == 1 {
            vec![self.x_star[0] + d[0].signum() * t]
        } else {
            let s = t / r;
            self.x_star
                .iter()
                .zip(&d)
                .map(|(c, v)| c + s * v)
                .collect()
        }
    }

    fn refresh_radius_constants(&mut self) {
        if let Objective::PowerNorm { alpha, p } = self.objective {
            let dd = self.radius;
            if p == 1.0 {
                self.lipschitz_f = alpha;
                self.smoothness = SmoothnessDescriptor {
                    constant: 2.0 * alpha,
                    exponent: 0.0,
                };
            } else {
                self.lipschitz_f = alpha * p * dd.powf(p - 1.0);
                if p == 2.0 {
                    self.smoothness = SmoothnessDescriptor {
                        constant: 2.0 * alpha,
                        exponent: 1.0,
                    };
                } else if p > 2.0 {
                    self.smoothness = SmoothnessDescriptor {
                        constant: alpha * p * (p - 1.0) * dd.powf(p - 2.0),
                        exponent: 1.0,
                    };
                }
            }
        }
    }

    /// Sampled `sup ‖g − g′‖ / ‖x − x′‖^η`, inflated by 5%.
    ///
    /// Power norms are positively homogeneous about `x*`, so the ratio is
    /// scale invariant and pairs are drawn from the unit ball. Half of the
    /// pairs are opposed (`x′ = −c·x` about `x*`), where the supremum lives.
    fn estimate_holder_constant(&self, eta: f64) -> f64 {
        let n = self.dimension();
        let mut rng = ChaCha8Rng::seed_from_u64(HOLDER_SEED);
        let mut best: f64 = 0.0;
        for i in 0..HOLDER_SAMPLE_PAIRS {
            let x = sample_ball(&mut rng, &self.x_star, 1.0);
            let y = if i % 2 == 0 {
                sample_ball(&mut rng, &self.x_star, 1.0)
            } else {
                let c: f64 = rng.random_range(0.5..=1.0);
                self.x_star
                    .iter()
                    .zip(&x)
                    .map(|(s, xi)| s - c * (xi - s))
                    .collect()
            };
            let gap = dist(&x, &y);
            if gap == 0.0 {
                continue;
            }
            let gx = self.subgradient(&x);
            let gy = self.subgradient(&y);
            best = best.max(dist(&gx, &gy) / gap.powf(eta));
        }
        debug_assert!(n > 0);
        best * HOLDER_INFLATION
    }
}

/// Exact prox of a 1-D max of affine functions.
///
/// The minimizer either sits inside a linear piece, where it equals
/// `x − ρ·slope`, or at a kink where two pieces cross; the objective is
/// evaluated at every such candidate and the best is returned.
fn piecewise_max_prox_1d(slopes: &[Vec<f64>], offsets: &[f64], x: f64, rho: f64) -> f64 {
    let f = |z: f64| {
        slopes
            .iter()
            .zip(offsets)
            .map(|(a, b)| a[0] * z + b)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let objective = |z: f64| f(z) + (z - x) * (z - x) / (2.0 * rho);
    let mut candidates: Vec<f64> = slopes.iter().map(|a| x - rho * a[0]).collect();
    for i in 0..slopes.len() {
        for j in (i + 1)..slopes.len() {
            let da = slopes[i][0] - slopes[j][0];
            if da != 0.0 {
                candidates.push((offsets[j] - offsets[i]) / da);
            }
        }
    }
    let mut best = candidates[0];
    let mut best_val = objective(best);
    for &z in &candidates[1..] {
        let v = objective(z);
        if v < best_val {
            best = z;
            best_val = v;
        }
    }
    best
}

/// `min_{‖d‖=1} max_i ⟨a_i, d⟩` over the active slopes at a minimizer.
///
/// This support-function minimum is attained at a facet normal of the hull
/// of the slopes, so the normals of all affinely independent `n`-subsets are
/// enumerated. A hull of dimension below `n` gives zero.
fn sharp_modulus(active: &[Vec<f64>], n: usize) -> f64 {
    if n == 1 {
        let hi = active.iter().map(|a| a[0]).fold(f64::NEG_INFINITY, f64::max);
        let lo = active.iter().map(|a| a[0]).fold(f64::INFINITY, f64::min);
        return hi.min(-lo).max(0.0);
    }
    let mut uniq: Vec<&Vec<f64>> = Vec::new();
    for a in active {
        if !uniq.contains(&a) {
            uniq.push(a);
        }
    }
    if uniq.len() < n + 1 || affine_rank(&uniq) < n {
        return 0.0;
    }
    let support = |d: &[f64]| {
        uniq.iter()
            .map(|a| dot(a, d))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut best = f64::INFINITY;
    let mut subset: Vec<usize> = (0..n).collect();
    loop {
        let rows: Vec<&Vec<f64>> = subset.iter().map(|&i| uniq[i]).collect();
        if let Some(normal) = facet_normal(&rows, n) {
            let neg: Vec<f64> = normal.iter().map(|v| -v).collect();
            best = best.min(support(&normal)).min(support(&neg));
        }
        if !next_combination(&mut subset, uniq.len()) {
            break;
        }
    }
    best.max(0.0)
}

fn affine_rank(points: &[&Vec<f64>]) -> usize {
    let n = points[0].len();
    let m = points.len() - 1;
    if m == 0 {
        return 0;
    }
    let diffs = DMatrix::from_fn(m, n, |r, c| points[r + 1][c] - points[0][c]);
    diffs.rank(1e-10)
}

/// Unit normal of the affine hull of `n` points in `R^n`, if that hull is a hyperplane.
fn facet_normal(points: &[&Vec<f64>], n: usize) -> Option<Vec<f64>> {
    let mut mat = DMatrix::<f64>::zeros(n, n);
    for r in 1..n {
        for c in 0..n {
            mat[(r - 1, c)] = points[r][c] - points[0][c];
        }
    }
    let svd = mat.svd(false, true);
    let v_t = svd.v_t?;
    let sv = &svd.singular_values;
    let (min_idx, _) = sv
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))?;
    let nonzero = sv.iter().filter(|s| **s > 1e-10).count();
    if nonzero != n - 1 {
        return None;
    }
    let normal: Vec<f64> = (0..n).map(|c| v_t[(min_idx, c)]).collect();
    let nn = norm(&normal);
    Some(normal.iter().map(|v| v / nn).collect())
}

fn next_combination(idx: &mut [usize], m: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < m - k + i {
            idx[i] += 1;
            for j in (i + 1)..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Random unit-ball direction helper shared by the verifiers.
pub(crate) fn gaussian_direction<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let nv = norm(&v);
        if nv > 1e-12 {
            return v.iter().map(|x| x / nv).collect();
        }
    }
}

mod inf_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}
