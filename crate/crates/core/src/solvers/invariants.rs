//! Per-iteration inequalities that hold along the traces of these methods.
//! Each check scans consecutive records and reports the worst violation.

use super::IterationRecord;
use crate::linalg::dist;
use crate::problems::{CertReport, Witness};

fn scan(
    trace: &[IterationRecord],
    tol: f64,
    violation: impl Fn(&IterationRecord, &IterationRecord) -> Option<f64>,
) -> CertReport {
    let mut worst = 0.0;
    let mut witness = Witness::None;
    let mut count = 0;
    for pair in trace.windows(2) {
        let (cur, next) = (&pair[0], &pair[1]);
        debug_assert_eq!(cur.k + 1, next.k, "records must be consecutive iterates");
        if let Some(v) = violation(cur, next) {
            count += 1;
            if v > worst {
                worst = v;
                witness = Witness::Pair(cur.x.clone(), next.x.clone());
            }
        }
    }
    CertReport::new(worst, witness, count, tol)
}

/// `‖x_{k+1} − x*‖ ≤ ‖x_k − x*‖`
pub fn distance_monotone(trace: &[IterationRecord], tol: f64) -> CertReport {
    scan(trace, tol, |cur, next| Some(next.dist - cur.dist))
}

/// `‖x_{k+1} − x*‖² ≤ ‖x_k − x*‖² − (f(x_k) − f*)² / M²` for the Polyak method,
/// with `M` a bound on subgradient norms along the trajectory.
pub fn subgradient_recurrence(trace: &[IterationRecord], lipschitz: f64, tol: f64) -> CertReport {
    scan(trace, tol, |cur, next| {
        let decrease = cur.gap * cur.gap / (lipschitz * lipschitz);
        Some(next.dist * next.dist - (cur.dist * cur.dist - decrease))
    })
}

/// `f(x_{k+1}) ≤ f(x_k) − ‖x_{k+1} − x_k‖² / ρ` for the proximal point method.
pub fn prox_descent(trace: &[IterationRecord], rho: f64, tol: f64) -> CertReport {
    scan(trace, tol, |cur, next| {
        let step = dist(&next.x, &cur.x);
        Some(next.f - (cur.f - step * step / rho))
    })
}

/// `‖x_{k+1} − x_k‖ ≥ ρα` on an `(α, 1)`-growth instance, for every step that
/// does not land on a minimizer.
pub fn prox_sharp_step(trace: &[IterationRecord], rho: f64, alpha: f64, tol: f64) -> CertReport {
    scan(trace, tol, |cur, next| {
        (next.gap > 0.0).then(|| rho * alpha - dist(&next.x, &cur.x))
    })
}
