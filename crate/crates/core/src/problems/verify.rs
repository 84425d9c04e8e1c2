//! Sampled certificates for smoothness and growth descriptors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{gaussian_direction, GrowthDescriptor, ProblemInstance, SmoothnessDescriptor};
use crate::linalg::dist;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    None,
    Point(Vec<f64>),
    Pair(Vec<f64>, Vec<f64>),
}

/// Outcome of a sampled inequality check. `passed` iff `max_violation ≤ tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertReport {
    pub passed: bool,
    pub max_violation: f64,
    pub witness: Witness,
    pub samples_checked: usize,
    pub tolerance: f64,
}

impl CertReport {
    pub fn new(max_violation: f64, witness: Witness, samples_checked: usize, tolerance: f64) -> Self {
        let max_violation = max_violation.max(0.0);
        Self {
            passed: max_violation <= tolerance,
            max_violation,
            witness,
            samples_checked,
            tolerance,
        }
    }
}

/// Tracks the worst violation seen so far and where it happened.
pub(crate) struct Worst {
    pub violation: f64,
    pub witness: Witness,
    pub count: usize,
}

impl Worst {
    pub fn new() -> Self {
        Self {
            violation: 0.0,
            witness: Witness::None,
            count: 0,
        }
    }

    pub fn observe(&mut self, violation: f64, witness: impl FnOnce() -> Witness) {
        self.count += 1;
        if violation > self.violation || violation.is_nan() {
            self.violation = if violation.is_nan() { f64::INFINITY } else { violation };
            self.witness = witness();
        }
    }

    pub fn report(self, tolerance: f64) -> CertReport {
        CertReport::new(self.violation, self.witness, self.count, tolerance)
    }
}

/// Uniform sample from the ball `B(center, radius)`.
pub fn sample_ball<R: Rng>(rng: &mut R, center: &[f64], radius: f64) -> Vec<f64> {
    let n = center.len();
    let u: f64 = rng.random();
    let r = radius * u.powf(1.0 / n as f64);
    let dir = gaussian_direction(rng, n);
    center.iter().zip(&dir).map(|(c, d)| c + r * d).collect()
}

/// Checks `‖g − g′‖ ≤ L‖x − x′‖^η + tol` on `sample_count` random pairs from
/// `B(x*, radius)`.
pub fn verify_smoothness(
    f: &ProblemInstance,
    descriptor: SmoothnessDescriptor,
    sample_count: usize,
    radius: f64,
    tol: f64,
    seed: u64,
) -> CertReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = Worst::new();
    for _ in 0..sample_count.max(2) {
        let x = sample_ball(&mut rng, f.x_star(), radius);
        let y = sample_ball(&mut rng, f.x_star(), radius);
        let gx = f.subgradient(&x);
        let gy = f.subgradient(&y);
        let lhs = dist(&gx, &gy);
        let rhs = if descriptor.constant.is_infinite() {
            f64::INFINITY
        } else {
            descriptor.constant * dist(&x, &y).powf(descriptor.exponent)
        };
        worst.observe(lhs - rhs, || Witness::Pair(x.clone(), y.clone()));
    }
    worst.report(tol)
}

/// Checks `f(x) ≥ f(x*) + α‖x − x*‖^p − tol` on a tensor grid of roughly
/// `grid_count` points covering `B(x*, radius)`.
pub fn verify_growth(
    f: &ProblemInstance,
    descriptor: GrowthDescriptor,
    radius: f64,
    grid_count: usize,
    tol: f64,
) -> CertReport {
    let n = f.dimension();
    let per_axis = if n == 1 {
        grid_count.max(2)
    } else {
        ((grid_count as f64).powf(1.0 / n as f64).round() as usize).max(2)
    };
    let center = f.x_star();
    let step = 2.0 * radius / (per_axis - 1) as f64;
    let mut worst = Worst::new();
    let mut idx = vec![0usize; n];
    loop {
        let x: Vec<f64> = center
            .iter()
            .zip(&idx)
            .map(|(c, &i)| c - radius + step * i as f64)
            .collect();
        let r = dist(&x, center);
        if r <= radius * (1.0 + 1e-12) {
            let bound = f.f_star() + descriptor.modulus * r.powf(descriptor.exponent);
            let violation = bound - f.value(&x);
            worst.observe(violation, || Witness::Point(x.clone()));
        }
        // odometer increment
        let mut axis = 0;
        loop {
            if axis == n {
                return worst.report(tol);
            }
            idx[axis] += 1;
            if idx[axis] < per_axis {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}
