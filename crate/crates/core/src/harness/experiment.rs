//! Running a configured experiment and comparing it with rate predictions.

use std::fs;
use std::io::BufWriter;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Prediction, Transform};
use super::Result;
use crate::envelope::{
    build_auxiliary, check_agreement, check_growth, default_grid, smoothness_reports, snap_trace,
    EnvelopeResult, ModelPoint, SmoothnessReports,
};
use crate::linalg::dist;
use crate::problems::{verify_growth, verify_smoothness, CertReport, ProblemInstance, SmoothnessDescriptor};
use crate::rates::{
    lift_general, lift_growth, restart_sum_general, restart_sum_growth, Rate, RateBound, RateFn,
    RateQuery,
};
use crate::solvers::{candidate_gamma, restart_fom, IterationRecord, RunMetadata, RunResult, Termination};

const SMOOTHNESS_SAMPLES: usize = 1000;
const GROWTH_GRID: usize = 2001;
const CERT_TOL: f64 = 1e-9;

/// Observed iterations against one predicted bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub observed_iterations: usize,
    /// The raw real-valued bound.
    pub predicted_bound: f64,
    pub predicted_ceiled: f64,
    /// `observed ≤ ⌈predicted⌉`; absent for asymptotic bounds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_respected: Option<bool>,
    /// `predicted / observed`; absent when nothing was observed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack_ratio: Option<f64>,
    pub asymptotic_only: bool,
    /// The run stopped at `max_iter` before reaching its target.
    pub inconclusive: bool,
}

impl ComparisonReport {
    /// Passes unless a non-asymptotic bound was violated.
    pub fn ok(&self) -> bool {
        self.bound_respected != Some(false)
    }
}

pub fn compare_bounds(result: &RunResult, bound: RateBound) -> ComparisonReport {
    let observed = result.iterations_used;
    let ceiled = bound.iterations.ceil();
    ComparisonReport {
        observed_iterations: observed,
        predicted_bound: bound.iterations,
        predicted_ceiled: ceiled,
        bound_respected: (!bound.asymptotic_only).then_some(observed as f64 <= ceiled),
        slack_ratio: (observed > 0).then(|| bound.iterations / observed as f64),
        asymptotic_only: bound.asymptotic_only,
        inconclusive: result.terminated == Termination::MaxIter,
    }
}

/// The parameters an instance and a run supply to every prediction.
pub fn base_query(
    inst: &ProblemInstance,
    x0: &[f64],
    epsilon: f64,
    rho: f64,
    s: SmoothnessDescriptor,
) -> Result<RateQuery> {
    let mut q = RateQuery::new()
        .delta0(inst.eval(x0)? - inst.f_star())
        .epsilon(epsilon)
        .lipschitz(inst.lipschitz_f())
        .eta(s.exponent)
        .radius(dist(x0, inst.x_star()))
        .rho(rho);
    if let Some(g) = inst.growth() {
        q = q.alpha(g.modulus).p(g.exponent);
    }
    Ok(q)
}

fn overlay(base: RateQuery, o: &RateQuery) -> RateQuery {
    RateQuery {
        delta0: o.delta0.or(base.delta0),
        epsilon: o.epsilon.or(base.epsilon),
        alpha: o.alpha.or(base.alpha),
        p: o.p.or(base.p),
        q: o.q.or(base.q),
        lipschitz: o.lipschitz.or(base.lipschitz),
        eta: o.eta.or(base.eta),
        radius: o.radius.or(base.radius),
        rho: o.rho.or(base.rho),
    }
}

/// Fills a prediction's query from `base` and evaluates it.
pub fn predict(pred: &Prediction, base: &RateQuery) -> Result<(RateQuery, RateBound)> {
    let mut q = *base;
    if pred.transform != Transform::None {
        q.q = base.p;
        q.p = pred.rate.growth_exponent();
    }
    let q = overlay(q, &pred.query);
    let rate: &dyn RateFn = &pred.rate;
    let bound = match pred.transform {
        Transform::None => rate.eval(&q)?,
        Transform::LiftGeneral => lift_general(rate, &q)?,
        Transform::LiftGrowth => lift_growth(rate, &q)?,
        Transform::RestartGeneral => restart_sum_general(rate, &q)?,
        Transform::RestartGrowth => restart_sum_growth(rate, &q)?,
    };
    Ok((q, bound))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionOutcome {
    pub rate: Rate,
    pub transform: Transform,
    pub query: RateQuery,
    pub comparison: ComparisonReport,
}

/// Sampled checks of the instance's own descriptors on `B(x*, D)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceCertificates {
    pub radius: f64,
    pub smoothness: CertReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth: Option<CertReport>,
}

/// Growth of `h` at the rate transferred from `(α, q)` growth of `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftedGrowth {
    pub alpha_target: f64,
    pub p: f64,
    pub q: f64,
    pub report: CertReport,
}

/// Certification of the auxiliary envelope of one trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeOutcome {
    pub points: usize,
    /// The accuracy at which none of the points' candidates is optimal.
    pub epsilon: f64,
    pub radius: f64,
    pub descriptor: SmoothnessDescriptor,
    /// `L D^{η+1}/(η+1) ≥ f(x0) − f*`
    pub precondition: bool,
    pub agreement: CertReport,
    pub smoothness: SmoothnessReports,
    /// Growth at `ε/D^p`.
    pub growth_general: CertReport,
    pub p: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth_lifted: Option<LiftedGrowth>,
}

impl EnvelopeOutcome {
    pub fn passed(&self) -> bool {
        self.agreement.passed
            && self.smoothness.primal.passed
            && self.smoothness.dual.passed
            && self.growth_general.passed
            && self.growth_lifted.as_ref().is_none_or(|g| g.report.passed)
    }

    /// One line per certificate.
    pub fn summary(&self) -> String {
        let mark = |r: &CertReport| {
            format!(
                "{} (violation {:.3e}, tol {:.3e})",
                if r.passed { "pass" } else { "FAIL" },
                r.max_violation,
                r.tolerance
            )
        };
        let mut s = format!(
            "agreement {}; smoothness primal {}; smoothness dual {}; growth eps/D^p {}",
            mark(&self.agreement),
            mark(&self.smoothness.primal),
            mark(&self.smoothness.dual),
            mark(&self.growth_general)
        );
        if let Some(g) = &self.growth_lifted {
            s.push_str(&format!("; growth lifted {}", mark(&g.report)));
        }
        if !self.precondition {
            s.push_str("; precondition L D^(eta+1)/(eta+1) >= delta0 FAILS");
        }
        s
    }
}

fn candidate_gap(inst: &ProblemInstance, pt: &ModelPoint, s: SmoothnessDescriptor) -> Result<f64> {
    let gamma = candidate_gamma(&[pt.g], s)?;
    Ok(inst.value(&[pt.x - gamma * pt.g]) - inst.f_star())
}

/// Builds and certifies the envelope of `records` on a 1-D instance.
///
/// `records[0]` must be the starting point; `D = |x0 − x*|`. The accuracy is
/// lowered to `0.9·min gap` when a snapped candidate is already
/// `epsilon`-optimal. Growth is checked at `ε/D^p`, and at
/// `α^{p/q}ε^{1−p/q}` with exponent `lifted_p` when the instance has `(α, q)`
/// growth with `q > lifted_p`.
pub fn certify_trace(
    inst: &ProblemInstance,
    records: &[IterationRecord],
    s: SmoothnessDescriptor,
    epsilon: f64,
    p: f64,
    lifted_p: Option<f64>,
) -> Result<(EnvelopeOutcome, EnvelopeResult)> {
    let x0 = &records.first().ok_or_else(|| super::HarnessError::InvalidConfig(vec!["trace: empty".into()]))?.x;
    let radius = dist(x0, inst.x_star());
    let delta0 = inst.eval(x0)? - inst.f_star();
    let grid = default_grid(inst, radius)?;
    let points = snap_trace(inst, records, &grid)?;
    let mut min_gap = f64::INFINITY;
    for pt in &points {
        min_gap = min_gap.min(candidate_gap(inst, pt, s)?);
    }
    let epsilon = if min_gap <= epsilon { 0.9 * min_gap } else { epsilon };

    let mut res = build_auxiliary(&points, ModelPoint::minimizer(inst)?, s, &grid)?;
    let agreement = check_agreement(&res, inst, &points, res.agreement_tolerance())?;
    let tol = res.discretization_tolerance();
    let smoothness = smoothness_reports(&res, s, tol);
    let growth_general = check_growth(&res, epsilon / radius.powf(p), p, radius, tol)?;
    let growth_lifted = match (lifted_p, inst.growth()) {
        (Some(lp), Some(g)) if g.exponent > lp => {
            let ratio = lp / g.exponent;
            let alpha_target = g.modulus.powf(ratio) * epsilon.powf(1.0 - ratio);
            Some(LiftedGrowth {
                alpha_target,
                p: lp,
                q: g.exponent,
                report: check_growth(&res, alpha_target, lp, radius, tol)?,
            })
        }
        _ => None,
    };
    let eta = s.exponent;
    let precondition = s.constant / (eta + 1.0) * radius.powf(eta + 1.0) >= delta0;

    res.agreement = Some(agreement.clone());
    res.smoothness = Some(smoothness.merged());
    res.growth = Some(growth_general.clone());
    let outcome = EnvelopeOutcome {
        points: points.len(),
        epsilon,
        radius,
        descriptor: s,
        precondition,
        agreement,
        smoothness,
        growth_general,
        p,
        growth_lifted,
    };
    Ok((outcome, res))
}

/// Everything `run_experiment` writes to `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub method: String,
    pub run: RunMetadata,
    pub comparisons: Vec<PredictionOutcome>,
    pub certificates: InstanceCertificates,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub envelope: Option<EnvelopeOutcome>,
}

impl ExperimentReport {
    /// No asserted bound was violated and every certificate passed.
    pub fn passed(&self) -> bool {
        self.comparisons.iter().all(|c| c.comparison.ok())
            && self.envelope.as_ref().is_none_or(EnvelopeOutcome::passed)
    }
}

/// Validates `cfg`, runs the solver, evaluates the predictions, and writes
/// `trace.csv`, `report.json`, and (with the envelope on) `envelope.csv`
/// into the resolved output directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let inst = cfg.validate()?;
    let method = cfg.method(&inst);
    let solver_cfg = cfg.solver_config();
    let run = if cfg.restart {
        restart_fom(&method, &inst, &cfg.x0, &solver_cfg)?
    } else {
        method.run(&inst, &cfg.x0, &solver_cfg)?
    };
    let s = cfg.descriptor(&inst);

    let base = base_query(&inst, &cfg.x0, cfg.epsilon, cfg.rho, s)?;
    let comparisons = cfg
        .predictions
        .iter()
        .map(|pred| {
            let (query, bound) = predict(pred, &base)?;
            Ok(PredictionOutcome {
                rate: pred.rate,
                transform: pred.transform,
                query,
                comparison: compare_bounds(&run, bound),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let d = dist(&cfg.x0, inst.x_star());
    let radius = if d > 0.0 { d } else { 1.0 };
    let certificates = InstanceCertificates {
        radius,
        smoothness: verify_smoothness(&inst, inst.smoothness(), SMOOTHNESS_SAMPLES, radius, CERT_TOL, cfg.seed),
        growth: inst.growth().map(|g| verify_growth(&inst, g, radius, GROWTH_GRID, CERT_TOL)),
    };

    let out_dir = cfg.resolved_output_dir();
    fs::create_dir_all(&out_dir)?;
    run.write_trace_csv(BufWriter::new(fs::File::create(out_dir.join("trace.csv"))?))?;

    let mut envelope = None;
    if cfg.envelope && d > 0.0 && cfg.record_trace {
        // the final record is the one whose candidate met the target
        let keep = match run.terminated {
            Termination::MaxIter => run.trace.len(),
            _ => run.trace.len().saturating_sub(1).max(1),
        };
        let p = inst.growth().map_or(1.0, |g| g.exponent);
        let (outcome, res) = certify_trace(&inst, &run.trace[..keep], s, cfg.epsilon, p, Some(1.0))?;
        res.write_csv(&inst, BufWriter::new(fs::File::create(out_dir.join("envelope.csv"))?))?;
        envelope = Some(outcome);
    }

    let report = ExperimentReport {
        config: cfg.clone(),
        method: method.name().to_string(),
        run: run.metadata(),
        comparisons,
        certificates,
        envelope,
    };
    let mut json = serde_json::to_string_pretty(&report).expect("reports always serialize");
    json.push('\n');
    fs::write(out_dir.join("report.json"), json)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::RateBound;
    use crate::solvers::{polyak_subgradient, SolverConfig};
    use crate::problems::make_power_norm;

    fn run_with(iterations: usize, terminated: Termination) -> RunResult {
        RunResult {
            trace: Vec::new(),
            terminated,
            iterations_used: iterations,
            epsilon: 1.0,
            solution: vec![0.0],
            final_gap: 0.0,
        }
    }

    #[test]
    fn comparison_boundaries() {
        let c = compare_bounds(&run_with(9, Termination::EpsReached), RateBound::exact(9.0));
        assert_eq!(c.bound_respected, Some(true));
        assert_eq!(c.slack_ratio, Some(1.0));
        let c = compare_bounds(&run_with(12, Termination::EpsReached), RateBound::exact(9.0));
        assert_eq!(c.bound_respected, Some(false));
        assert!(!c.ok());
        let c = compare_bounds(&run_with(12, Termination::EpsReached), RateBound::asymptotic(9.0));
        assert_eq!(c.bound_respected, None);
        assert_eq!(c.slack_ratio, Some(0.75));
        let c = compare_bounds(&run_with(5, Termination::MaxIter), RateBound::exact(8.2));
        assert!(c.inconclusive);
        assert_eq!(c.predicted_ceiled, 9.0);
        assert_eq!(c.bound_respected, Some(true));
        let c = compare_bounds(&run_with(0, Termination::EpsReached), RateBound::exact(0.0));
        assert_eq!(c.slack_ratio, None);
    }

    #[test]
    fn predictions_fill_from_instance() {
        let inst = make_power_norm(1.0, 2.0, vec![0.0]).unwrap().with_growth_radius(3.0).unwrap();
        let base = base_query(&inst, &[3.0], 0.1, 1.0, inst.smoothness()).unwrap();
        assert_eq!(base.delta0, Some(9.0));
        assert_eq!(base.radius, Some(3.0));
        assert_eq!(base.lipschitz, Some(6.0));
        let pred = Prediction {
            rate: Rate::SubgradSharp,
            transform: Transform::LiftGrowth,
            query: RateQuery::default(),
        };
        let (q, bound) = predict(&pred, &base).unwrap();
        assert_eq!((q.p, q.q), (Some(1.0), Some(2.0)));
        let oracle = 4.0 * 36.0 / (1.0 * 0.1) * (9.0f64 / 0.1).log2();
        assert!((bound.iterations - oracle).abs() <= 1e-12 * oracle);
    }

    #[test]
    fn certifies_a_sharp_trace() {
        let inst = make_power_norm(1.0, 1.0, vec![0.5]).unwrap();
        let run = polyak_subgradient(&inst, &[1.5], &SolverConfig::new(1e-9)).unwrap();
        let (outcome, _) = certify_trace(&inst, &run.trace[..1], inst.smoothness(), 0.5, 1.0, None).unwrap();
        assert!(outcome.agreement.passed);
        assert!(outcome.growth_general.passed);
        assert!(outcome.smoothness.dual.passed);
        assert!(outcome.precondition);
    }
}
