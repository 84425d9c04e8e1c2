//! Sampled certificates for the agreement, smoothness, and growth properties
//! of the auxiliary objective.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{conjugate_with_argmax, dual_grid_for, EnvelopeError, EnvelopeResult, ModelPoint, Result};
use crate::problems::{CertReport, ProblemInstance, SmoothnessDescriptor, Witness, Worst};

const PAIR_SEED: u64 = 0x5eed;
const RANDOM_PAIRS: usize = 4000;

fn locate(res: &EnvelopeResult, x: f64) -> Result<usize> {
    let i = res.h.nearest_index(x);
    let half = 0.5 * res.spacing();
    let distance = (res.h.grid[i] - x).abs();
    if distance > half * (1.0 + 1e-9) {
        return Err(EnvelopeError::OffGrid { x, distance, half });
    }
    Ok(i)
}

/// `h(x_i) = f(x_i)` and `g_i ∈ ∂h(x_i)` at every visited point and at the
/// minimizer. The value is compared with both the stored `f_i` and the
/// oracle; the subgradient is checked as a supporting line over the grid.
pub fn check_agreement(
    res: &EnvelopeResult,
    inst: &ProblemInstance,
    points: &[ModelPoint],
    tol: f64,
) -> Result<CertReport> {
    let mut worst = Worst::new();
    let h = &res.h;
    for pt in points.iter().chain(std::iter::once(&res.x_star)) {
        let i = locate(res, pt.x)?;
        let oracle = inst.value(&[pt.x]);
        let gap = (h.values[i] - pt.f).abs().max((h.values[i] - oracle).abs());
        worst.observe(gap, || Witness::Point(vec![pt.x]));
        let (xi, hi) = (h.grid[i], h.values[i]);
        for (&x, &v) in h.grid.iter().zip(&h.values) {
            let below = hi + pt.g * (x - xi) - v;
            worst.observe(below, || Witness::Pair(vec![pt.x], vec![x]));
        }
    }
    Ok(worst.report(tol))
}

/// The two halves of the smoothness certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessReports {
    /// `|h′(x) − h′(x′)| ≤ L|x − x′|^η` on finite-difference slopes.
    pub primal: CertReport,
    /// The matching lower bound on the discrete conjugate `h*`.
    pub dual: CertReport,
}

impl SmoothnessReports {
    pub fn merged(&self) -> CertReport {
        let worst = if self.dual.max_violation > self.primal.max_violation {
            &self.dual
        } else {
            &self.primal
        };
        CertReport {
            passed: self.primal.passed && self.dual.passed,
            max_violation: worst.max_violation,
            witness: worst.witness.clone(),
            samples_checked: self.primal.samples_checked + self.dual.samples_checked,
            tolerance: worst.tolerance,
        }
    }
}

/// Index pairs: all neighbours, seeded random pairs, and the two ends.
fn sample_pairs(lo: usize, hi: usize) -> Vec<(usize, usize)> {
    if hi <= lo {
        return Vec::new();
    }
    let mut pairs: Vec<(usize, usize)> = (lo..hi).map(|i| (i, i + 1)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(PAIR_SEED);
    for _ in 0..RANDOM_PAIRS {
        pairs.push((rng.random_range(lo..=hi), rng.random_range(lo..=hi)));
    }
    pairs.push((lo, hi));
    pairs
}

/// Primal and dual evidence that `h` is `(L, η)`-Hölder smooth.
///
/// The primal half compares forward-difference slopes at their midpoints.
/// The dual half works on the discrete conjugate restricted to the slopes
/// `h` actually attains (dual points whose maximizer is interior to the
/// grid). For `η > 0` it checks
/// `h*(g′) ≥ h*(g) + x(g)(g′ − g) + η/((η+1)L^{1/η})·|g′ − g|^{(η+1)/η}`.
/// For `η = 0` the bound is an indicator, so it checks its support instead:
/// the attained slopes must lie within `L` of every anchor subgradient.
pub fn smoothness_reports(res: &EnvelopeResult, s: SmoothnessDescriptor, tol: f64) -> SmoothnessReports {
    let (l, eta) = (s.constant, s.exponent);
    let h = &res.h;
    let slopes = h.slopes();
    let mids: Vec<f64> = h.grid.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();

    let mut primal = Worst::new();
    for (i, j) in sample_pairs(0, slopes.len() - 1) {
        let bound = if eta == 0.0 {
            l
        } else {
            l * (mids[i] - mids[j]).abs().powf(eta)
        };
        let v = (slopes[i] - slopes[j]).abs() - bound;
        primal.observe(v, || Witness::Pair(vec![mids[i]], vec![mids[j]]));
    }

    let mut dual = Worst::new();
    let dual_eval = dual_grid_for(h).and_then(|dg| {
        let (conj, argmax) = conjugate_with_argmax(h, &dg)?;
        Ok((dg, conj, argmax))
    });
    if let Ok((dg, conj, argmax)) = dual_eval {
        let last = h.len() - 1;
        let interior: Vec<usize> = (0..dg.len())
            .filter(|&k| argmax[k] != 0 && argmax[k] != last)
            .collect();
        if let (Some(&lo), Some(&hi)) = (interior.first(), interior.last()) {
            if eta == 0.0 {
                let dual_step = dg[1] - dg[0];
                for a in &res.anchors {
                    let v = (dg[hi] - (a.g + l)).max((a.g - l) - dg[lo]) - dual_step;
                    dual.observe(v, || Witness::Pair(vec![a.g], vec![dg[lo], dg[hi]]));
                }
            } else {
                let c = eta / ((eta + 1.0) * l.powf(1.0 / eta));
                let r = (eta + 1.0) / eta;
                for (i, j) in sample_pairs(lo, hi) {
                    for (a, b) in [(i, j), (j, i)] {
                        let x = h.grid[argmax[a]];
                        let d = dg[b] - dg[a];
                        let lower = conj[a] + x * d + c * d.abs().powf(r);
                        dual.observe(lower - conj[b], || Witness::Pair(vec![dg[a]], vec![dg[b]]));
                    }
                }
            }
        }
    }
    SmoothnessReports {
        primal: primal.report(tol),
        dual: dual.report(tol),
    }
}

/// Both halves of [`smoothness_reports`], merged into one report.
pub fn check_smoothness_dual(res: &EnvelopeResult, s: SmoothnessDescriptor, tol: f64) -> CertReport {
    smoothness_reports(res, s, tol).merged()
}

/// `h(x) ≥ h(x*) + α|x − x*|^p` on every gridpoint of `B(x*, D)`.
pub fn check_growth(res: &EnvelopeResult, alpha_target: f64, p: f64, d: f64, tol: f64) -> Result<CertReport> {
    let h = &res.h;
    let xs = res.x_star.x;
    let (lo, hi) = (h.grid[0], h.grid[h.len() - 1]);
    let slack = 1e-9 * d.max(res.spacing());
    if lo > xs - d + slack || hi < xs + d - slack {
        return Err(EnvelopeError::BallNotCovered {
            lo,
            hi,
            ball_lo: xs - d,
            ball_hi: xs + d,
        });
    }
    let h_star = h.values[locate(res, xs)?];
    let mut worst = Worst::new();
    for (&x, &v) in h.grid.iter().zip(&h.values) {
        let r = (x - xs).abs();
        if r <= d + slack {
            let bound = h_star + alpha_target * r.powf(p);
            worst.observe(bound - v, || Witness::Point(vec![x]));
        }
    }
    Ok(worst.report(tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::{build_auxiliary, centered_grid, snap_trace};
    use crate::problems::make_power_norm;
    use crate::solvers::{polyak_subgradient, SolverConfig};

    #[test]
    fn agreement_on_abs_polyak_trace() {
        let f = make_power_norm(1.0, 1.0, vec![0.0]).unwrap();
        let grid = centered_grid(0.0, 4.5, 4001).unwrap();
        let run = polyak_subgradient(&f, &[3.0], &SolverConfig::new(1e-9)).unwrap();
        let pts = snap_trace(&f, &run.trace, &grid).unwrap();
        let s = f.smoothness();
        let res = build_auxiliary(&pts, ModelPoint::minimizer(&f).unwrap(), s, &grid).unwrap();
        let tol = res.agreement_tolerance();
        let rep = check_agreement(&res, &f, &pts, tol).unwrap();
        assert!(rep.passed, "{rep:?}");

        let mut bad = pts.clone();
        bad[0].f += 1.0;
        let res = build_auxiliary(&bad, ModelPoint::minimizer(&f).unwrap(), s, &grid).unwrap();
        let rep = check_agreement(&res, &f, &bad, tol).unwrap();
        assert!(!rep.passed);
        assert_eq!(rep.witness, Witness::Point(vec![bad[0].x]));

        let res = build_auxiliary(&[], ModelPoint::minimizer(&f).unwrap(), s, &grid).unwrap();
        assert!(check_agreement(&res, &f, &[], tol).unwrap().passed);

        let off = [ModelPoint::new(10.0, 10.0, 1.0)];
        assert!(matches!(check_agreement(&res, &f, &off, tol), Err(EnvelopeError::OffGrid { .. })));
    }

    #[test]
    fn smoothness_of_quadratic_models() {
        let grid = centered_grid(0.0, 3.0, 4001).unwrap();
        let s = SmoothnessDescriptor::new(2.0, 1.0).unwrap();
        let pts = [ModelPoint::new(1.0, 1.0, 2.0), ModelPoint::new(-0.5, 0.25, -1.0)];
        let res = build_auxiliary(&pts, ModelPoint::new(0.0, 0.0, 0.0), s, &grid).unwrap();
        let tol = res.discretization_tolerance();
        let reps = smoothness_reports(&res, s, tol);
        assert!(reps.primal.passed, "{:?}", reps.primal);
        assert!(reps.dual.passed, "{:?}", reps.dual);
        assert!(reps.dual.samples_checked > 1000);

        // halving L is caught by both halves
        let half = SmoothnessDescriptor::new(1.0, 1.0).unwrap();
        let reps = smoothness_reports(&res, half, tol);
        assert!(!reps.primal.passed && !reps.dual.passed);

        // a lone minimizer model with η = 1 is exactly L-smooth
        let res = build_auxiliary(&[], ModelPoint::new(0.0, 0.0, 0.0), s, &grid).unwrap();
        assert!(check_smoothness_dual(&res, s, tol).passed);
    }

    #[test]
    fn nonsmooth_models_with_understated_constant_fail() {
        let grid = centered_grid(0.0, 3.0, 4001).unwrap();
        let s = SmoothnessDescriptor::new(2.0, 0.0).unwrap();
        let pts = [ModelPoint::new(-1.0, 1.0, -1.0), ModelPoint::new(1.0, 1.0, 1.0)];
        let res = build_auxiliary(&pts, ModelPoint::new(0.0, 0.0, 0.0), s, &grid).unwrap();
        let tol = res.discretization_tolerance();
        // slopes of h span [−1, 1], exactly the claimed L = 2
        let reps = smoothness_reports(&res, s, tol);
        assert!(reps.primal.passed && reps.dual.passed, "{reps:?}");
        let half = SmoothnessDescriptor::new(1.0, 0.0).unwrap();
        let reps = smoothness_reports(&res, half, tol);
        assert!(!reps.primal.passed && !reps.dual.passed);
    }

    #[test]
    fn lone_nonsmooth_minimizer_model_spans_twice_its_constant() {
        // h_* = L|x| has slopes ±L, a spread of 2L
        let grid = centered_grid(0.0, 3.0, 4001).unwrap();
        let s = SmoothnessDescriptor::new(2.0, 0.0).unwrap();
        let res = build_auxiliary(&[], ModelPoint::new(0.0, 0.0, 0.0), s, &grid).unwrap();
        let reps = smoothness_reports(&res, s, res.discretization_tolerance());
        assert!(!reps.primal.passed);
        assert!((reps.primal.max_violation - 2.0).abs() < 1e-9);
        // the support surrogate around the anchor subgradient 0 holds
        assert!(reps.dual.passed, "{:?}", reps.dual);
    }

    #[test]
    fn growth_checks() {
        let f = make_power_norm(1.0, 1.0, vec![0.0]).unwrap();
        let grid = centered_grid(0.0, 3.0, 4001).unwrap();
        let pts: Vec<ModelPoint> = [2.0, 1.5, 1.0]
            .iter()
            .map(|&x| ModelPoint::from_instance(&f, x).unwrap())
            .collect();
        let res = build_auxiliary(&pts, ModelPoint::minimizer(&f).unwrap(), f.smoothness(), &grid).unwrap();
        let (eps, d) = (0.5, 2.0);
        let tol = res.discretization_tolerance();
        assert!(check_growth(&res, eps / d, 1.0, d, tol).unwrap().passed);
        assert!(check_growth(&res, 0.0, 1.0, d, tol).unwrap().passed);
        assert!(!check_growth(&res, 1.5, 1.0, d, tol).unwrap().passed);
        assert!(matches!(
            check_growth(&res, eps / d, 1.0, 3.5, tol),
            Err(EnvelopeError::BallNotCovered { .. })
        ));
    }
}
