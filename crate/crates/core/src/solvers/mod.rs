//! Proximal point, Polyak subgradient, and Hölder gradient descent, plus the
//! gap-halving restart wrapper. Every run produces a full trace.
//!
//! Each record stores the iterate `x_k`, the oracle answer `(f(x_k), g_k)`,
//! and the candidate `x_k − γ_k g_k` whose optimality gap drives
//! termination. Methods analyzed under the nonsmooth model use `γ_k = 0`;
//! gradient descent uses `γ_k` equal to its stepsize, so its candidate is the
//! next iterate.

pub mod invariants;
mod trace;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{axpy_neg, dist, dot, is_zero, norm};
use crate::problems::{ProblemError, ProblemInstance, SmoothnessDescriptor};

pub use trace::RunMetadata;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("stepsize undefined: {0}")]
    UndefinedStepsize(String),
}

pub type Result<T> = std::result::Result<T, SolverError>;

pub const DEFAULT_MAX_ITER: usize = 1_000_000;
/// Consecutive iterates closer than this are treated as a prox fixed point.
pub const FIXED_POINT_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub epsilon: f64,
    pub max_iter: usize,
    pub rho: f64,
    pub record_trace: bool,
}

impl SolverConfig {
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            max_iter: DEFAULT_MAX_ITER,
            rho: 1.0,
            record_trace: true,
        }
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = rho;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_record_trace(mut self, record_trace: bool) -> Self {
        self.record_trace = record_trace;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            bad.push(format!("epsilon = {} must be positive", self.epsilon));
        }
        if self.max_iter < 1 {
            bad.push("max_iter must be at least 1".to_string());
        }
        if !(self.rho.is_finite() && self.rho > 0.0) {
            bad.push(format!("rho = {} must be positive", self.rho));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(SolverError::InvalidConfig(bad.join("; ")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    EpsReached,
    MaxIter,
    ExactMin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub x: Vec<f64>,
    pub f: f64,
    pub g: Vec<f64>,
    pub gamma: f64,
    pub candidate: Vec<f64>,
    pub f_candidate: f64,
    /// `f(candidate) − f*`
    pub gap: f64,
    /// `‖x_k − x*‖`
    pub dist: f64,
    pub restart_epoch: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub trace: Vec<IterationRecord>,
    pub terminated: Termination,
    /// Number of update steps applied to reach `solution`.
    pub iterations_used: usize,
    pub epsilon: f64,
    /// The returned point: the final candidate, or the fixed point on exact termination.
    pub solution: Vec<f64>,
    pub final_gap: f64,
}

impl RunResult {
    pub fn iterates(&self) -> impl Iterator<Item = &[f64]> {
        self.trace.iter().map(|r| r.x.as_slice())
    }
}

/// A first-order method that can be run or wrapped by [`restart_fom`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Method {
    ProximalPoint,
    PolyakSubgradient,
    HolderGradientDescent { smoothness: SmoothnessDescriptor },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::ProximalPoint => "proximal_point",
            Method::PolyakSubgradient => "polyak_subgradient",
            Method::HolderGradientDescent { .. } => "holder_gradient_descent",
        }
    }

    pub fn run(&self, f: &ProblemInstance, x0: &[f64], cfg: &SolverConfig) -> Result<RunResult> {
        match self {
            Method::ProximalPoint => proximal_point(f, x0, cfg),
            Method::PolyakSubgradient => polyak_subgradient(f, x0, cfg),
            Method::HolderGradientDescent { smoothness } => {
                holder_gradient_descent(f, x0, *smoothness, cfg)
            }
        }
    }

    fn check(&self, f: &ProblemInstance) -> Result<()> {
        match self {
            Method::ProximalPoint if !f.has_prox() => {
                // surface the instance's own error message
                f.prox(f.x_star(), 1.0)?;
                Ok(())
            }
            Method::HolderGradientDescent { smoothness } => {
                smoothness.validate()?;
                if smoothness.exponent == 0.0 {
                    return Err(SolverError::UndefinedStepsize(
                        "gradient descent needs eta > 0; use the Polyak subgradient method".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn gamma(&self, g: &[f64]) -> Result<f64> {
        match self {
            Method::HolderGradientDescent { smoothness } => candidate_gamma(g, *smoothness),
            _ => Ok(0.0),
        }
    }

    fn next(&self, f: &ProblemInstance, rec: &IterationRecord, cfg: &SolverConfig) -> Result<Vec<f64>> {
        Ok(match self {
            Method::ProximalPoint => f.prox(&rec.x, cfg.rho)?,
            Method::PolyakSubgradient => {
                let step = (rec.f - f.f_star()) / dot(&rec.g, &rec.g);
                axpy_neg(&rec.x, step, &rec.g)
            }
            Method::HolderGradientDescent { .. } => rec.candidate.clone(),
        })
    }
}

/// `γ = ‖g‖^{(1−η)/η} / L^{1/η}` for `η > 0`, and `0` for `η = 0`.
pub fn candidate_gamma(g: &[f64], s: SmoothnessDescriptor) -> Result<f64> {
    if s.exponent == 0.0 {
        return Ok(0.0);
    }
    if !s.constant.is_finite() {
        return Err(SolverError::UndefinedStepsize(
            "eta > 0 requires a finite Hölder constant".into(),
        ));
    }
    let eta = s.exponent;
    Ok(norm(g).powf((1.0 - eta) / eta) / s.constant.powf(1.0 / eta))
}

/// `x − γ g` with `γ` from [`candidate_gamma`].
pub fn offset_candidate(x: &[f64], g: &[f64], s: SmoothnessDescriptor) -> Result<Vec<f64>> {
    let gamma = candidate_gamma(g, s)?;
    if gamma == 0.0 {
        return Ok(x.to_vec());
    }
    Ok(axpy_neg(x, gamma, g))
}

/// `x_{k+1} = prox_{ρ,f}(x_k)`.
pub fn proximal_point(f: &ProblemInstance, x0: &[f64], cfg: &SolverConfig) -> Result<RunResult> {
    drive(&Method::ProximalPoint, f, x0, cfg)
}

/// `x_{k+1} = x_k − ρ_k g_k` with `ρ_k = (f(x_k) − f*) / ‖g_k‖²`.
pub fn polyak_subgradient(f: &ProblemInstance, x0: &[f64], cfg: &SolverConfig) -> Result<RunResult> {
    drive(&Method::PolyakSubgradient, f, x0, cfg)
}

/// `x_{k+1} = x_k − ρ_k ∇f(x_k)` with `ρ_k = ‖∇f(x_k)‖^{(1−η)/η} / L^{1/η}`.
pub fn holder_gradient_descent(
    f: &ProblemInstance,
    x0: &[f64],
    smoothness: SmoothnessDescriptor,
    cfg: &SolverConfig,
) -> Result<RunResult> {
    drive(&Method::HolderGradientDescent { smoothness }, f, x0, cfg)
}

fn record(method: &Method, f: &ProblemInstance, k: usize, x: Vec<f64>) -> Result<IterationRecord> {
    let fx = f.eval(&x)?;
    let g = f.subgrad(&x)?;
    let gamma = method.gamma(&g)?;
    let (candidate, f_candidate) = if gamma == 0.0 {
        (x.clone(), fx)
    } else {
        let c = axpy_neg(&x, gamma, &g);
        let fc = f.eval(&c)?;
        (c, fc)
    };
    Ok(IterationRecord {
        k,
        dist: dist(&x, f.x_star()),
        gap: f_candidate - f.f_star(),
        x,
        f: fx,
        g,
        gamma,
        candidate,
        f_candidate,
        restart_epoch: 0,
    })
}

fn drive(method: &Method, f: &ProblemInstance, x0: &[f64], cfg: &SolverConfig) -> Result<RunResult> {
    cfg.validate()?;
    method.check(f)?;
    let mut trace = Vec::new();
    let mut x = x0.to_vec();
    let mut k = 0;
    loop {
        let rec = record(method, f, k, x)?;
        let outcome = if is_zero(&rec.g) {
            Some((Termination::ExactMin, rec.x.clone(), rec.f - f.f_star(), k))
        } else if rec.gap <= cfg.epsilon {
            let steps = if rec.gamma == 0.0 { k } else { k + 1 };
            Some((Termination::EpsReached, rec.candidate.clone(), rec.gap, steps))
        } else if k >= cfg.max_iter {
            Some((Termination::MaxIter, rec.x.clone(), rec.f - f.f_star(), k))
        } else {
            None
        };
        let next = match outcome {
            Some(_) => None,
            None => Some(method.next(f, &rec, cfg)?),
        };
        let fixed_point = next
            .as_ref()
            .is_some_and(|n| dist(n, &rec.x) <= FIXED_POINT_TOL);
        let done = outcome.or_else(|| {
            fixed_point.then(|| (Termination::ExactMin, rec.x.clone(), rec.f - f.f_star(), k))
        });
        if !cfg.record_trace {
            trace.clear();
        }
        trace.push(rec);
        if let Some((terminated, solution, final_gap, iterations_used)) = done {
            return Ok(RunResult {
                trace,
                terminated,
                iterations_used,
                epsilon: cfg.epsilon,
                solution,
                final_gap,
            });
        }
        x = next.expect("a step was computed");
        k += 1;
    }
}

/// Runs `inner` to successively halved accuracy targets, restarting each
/// epoch at the candidate that met the previous target.
///
/// With `N = ⌈log₂((f(x0) − f*)/ε)⌉` the targets are `2^{N−1}ε, …, 2ε, ε`.
/// An epoch whose starting point already meets its target is skipped. Epoch
/// traces are concatenated with a global iteration counter; an epoch's
/// starting record is dropped when it repeats the previous epoch's final
/// record.
pub fn restart_fom(
    inner: &Method,
    f: &ProblemInstance,
    x0: &[f64],
    cfg: &SolverConfig,
) -> Result<RunResult> {
    cfg.validate()?;
    inner.check(f)?;
    let delta0 = f.eval(x0)? - f.f_star();
    let epochs = epoch_count(delta0, cfg.epsilon);
    if epochs == 0 {
        let rec = record(inner, f, 0, x0.to_vec())?;
        return Ok(RunResult {
            final_gap: delta0,
            trace: vec![rec],
            terminated: Termination::EpsReached,
            iterations_used: 0,
            epsilon: cfg.epsilon,
            solution: x0.to_vec(),
        });
    }

    let mut target = cfg.epsilon * 2f64.powi(epochs as i32 - 1);
    let mut trace: Vec<IterationRecord> = Vec::new();
    let mut x = x0.to_vec();
    let mut used = 0;
    let mut last = None;
    let mut gap = delta0;
    for epoch in 0..epochs {
        if gap <= target {
            // the carried candidate already meets this epoch's target
            target /= 2.0;
            continue;
        }
        let inner_cfg = SolverConfig {
            epsilon: target,
            max_iter: cfg.max_iter.saturating_sub(used).max(1),
            ..*cfg
        };
        let run = inner.run(f, &x, &inner_cfg)?;
        for mut rec in run.trace.iter().cloned() {
            rec.k += used;
            rec.restart_epoch = epoch;
            if trace.last().is_some_and(|prev| prev.k == rec.k) {
                continue;
            }
            if !cfg.record_trace {
                trace.clear();
            }
            trace.push(rec);
        }
        used += run.iterations_used;
        x = run.solution.clone();
        gap = run.final_gap;
        let stop = run.terminated != Termination::EpsReached;
        last = Some(run);
        if stop {
            break;
        }
        target /= 2.0;
    }
    let last = last.expect("the first epoch always runs");
    Ok(RunResult {
        trace,
        terminated: last.terminated,
        iterations_used: used,
        epsilon: cfg.epsilon,
        solution: last.solution,
        final_gap: last.final_gap,
    })
}

/// `⌈log₂(Δ0/ε)⌉`, or zero when `Δ0 ≤ ε`.
pub fn epoch_count(delta0: f64, epsilon: f64) -> usize {
    if delta0 <= epsilon {
        0
    } else {
        (delta0 / epsilon).log2().ceil() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::make_power_norm;

    fn abs() -> ProblemInstance {
        make_power_norm(1.0, 1.0, vec![0.0]).unwrap()
    }

    fn square() -> ProblemInstance {
        make_power_norm(1.0, 2.0, vec![0.0]).unwrap()
    }

    fn xs(run: &RunResult) -> Vec<f64> {
        run.iterates().map(|x| x[0]).collect()
    }

    #[test]
    fn offset_candidate_cases() {
        let nonsmooth = SmoothnessDescriptor::new(2.0, 0.0).unwrap();
        assert_eq!(offset_candidate(&[3.0], &[7.0], nonsmooth).unwrap(), vec![3.0]);
        let lip = SmoothnessDescriptor::new(2.0, 1.0).unwrap();
        assert_eq!(offset_candidate(&[1.0], &[2.0], lip).unwrap(), vec![0.0]);
        assert_eq!(offset_candidate(&[1.0], &[0.0], lip).unwrap(), vec![1.0]);
        let bad = SmoothnessDescriptor {
            constant: f64::INFINITY,
            exponent: 0.5,
        };
        assert!(offset_candidate(&[1.0], &[1.0], bad).is_err());
    }

    #[test]
    fn prox_on_abs_terminates_exactly() {
        let run = proximal_point(&abs(), &[5.0], &SolverConfig::new(1e-9).with_rho(2.0)).unwrap();
        assert_eq!(xs(&run), vec![5.0, 3.0, 1.0, 0.0]);
        assert_eq!(run.terminated, Termination::ExactMin);
        assert_eq!(run.iterations_used, 3);
    }

    #[test]
    fn prox_on_square_halves() {
        let run = proximal_point(&square(), &[4.0], &SolverConfig::new(1e-3).with_rho(0.5)).unwrap();
        assert_eq!(&xs(&run)[..4], &[4.0, 2.0, 1.0, 0.5]);
        assert_eq!(run.terminated, Termination::EpsReached);
        assert_eq!(run.iterations_used, 7);
        assert!(run.final_gap <= 1e-3);
    }

    #[test]
    fn prox_from_optimum_takes_no_steps() {
        let run = proximal_point(&abs(), &[0.0], &SolverConfig::new(1e-9)).unwrap();
        assert_eq!(run.iterations_used, 0);
        assert_eq!(run.trace.len(), 1);
        assert_eq!(run.terminated, Termination::ExactMin);
    }

    #[test]
    fn prox_rejects_unsupported_instance() {
        let f = crate::problems::make_polyhedral_norm(
            vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
            vec![0.0, 0.0],
        )
        .unwrap();
        let err = proximal_point(&f, &[1.0, 1.0], &SolverConfig::new(1e-3)).unwrap_err();
        assert!(matches!(err, SolverError::Problem(ProblemError::UnsupportedProx(_))));
    }

    #[test]
    fn polyak_examples() {
        let run = polyak_subgradient(&abs(), &[10.0], &SolverConfig::new(1e-9)).unwrap();
        assert_eq!(xs(&run), vec![10.0, 0.0]);
        assert_eq!(run.terminated, Termination::ExactMin);
        assert_eq!(run.iterations_used, 1);

        let run = polyak_subgradient(&square(), &[1.0], &SolverConfig::new(1e-6)).unwrap();
        assert_eq!(&xs(&run)[..4], &[1.0, 0.5, 0.25, 0.125]);

        let run = polyak_subgradient(&square(), &[0.0], &SolverConfig::new(1e-6)).unwrap();
        assert_eq!(run.iterations_used, 0);
    }

    #[test]
    fn gradient_descent_examples() {
        let lip = SmoothnessDescriptor::new(2.0, 1.0).unwrap();
        let run = holder_gradient_descent(&square(), &[1.0], lip, &SolverConfig::new(1e-9)).unwrap();
        assert_eq!(run.trace[0].gamma, 0.5);
        assert_eq!(run.solution, vec![0.0]);
        assert_eq!(run.iterations_used, 1);
        assert_eq!(run.terminated, Termination::EpsReached);

        let half = make_power_norm(0.5, 2.0, vec![0.0]).unwrap();
        let unit = SmoothnessDescriptor::new(1.0, 1.0).unwrap();
        let run = holder_gradient_descent(&half, &[1.0], unit, &SolverConfig::new(1e-9)).unwrap();
        assert_eq!(run.solution, vec![0.0]);
        assert_eq!(run.iterations_used, 1);

        let nonsmooth = SmoothnessDescriptor::new(2.0, 0.0).unwrap();
        assert!(matches!(
            holder_gradient_descent(&abs(), &[1.0], nonsmooth, &SolverConfig::new(1e-3)),
            Err(SolverError::UndefinedStepsize(_))
        ));
    }

    #[test]
    fn max_iter_stops_with_partial_trace() {
        let run = polyak_subgradient(&square(), &[1.0], &SolverConfig::new(1e-30).with_max_iter(5))
            .unwrap();
        assert_eq!(run.terminated, Termination::MaxIter);
        assert_eq!(run.iterations_used, 5);
        assert_eq!(run.trace.len(), 6);
    }

    #[test]
    fn trace_can_be_suppressed() {
        let cfg = SolverConfig::new(1e-6).with_record_trace(false);
        let run = polyak_subgradient(&square(), &[1.0], &cfg).unwrap();
        assert_eq!(run.trace.len(), 1);
        assert_eq!(run.trace[0].k, run.iterations_used);
    }

    #[test]
    fn config_validation_lists_fields() {
        let cfg = SolverConfig {
            epsilon: 0.0,
            max_iter: 0,
            rho: -1.0,
            record_trace: true,
        };
        let SolverError::InvalidConfig(msg) = cfg.validate().unwrap_err() else {
            panic!()
        };
        assert!(msg.contains("epsilon") && msg.contains("max_iter") && msg.contains("rho"));
    }

    #[test]
    fn restart_polyak_on_abs_matches_plain_run() {
        let f = abs();
        let cfg = SolverConfig::new(1.0);
        let plain = polyak_subgradient(&f, &[8.0], &cfg).unwrap();
        let wrapped = restart_fom(&Method::PolyakSubgradient, &f, &[8.0], &cfg).unwrap();
        assert_eq!(epoch_count(8.0, 1.0), 3);
        assert_eq!(xs(&wrapped), xs(&plain));
        assert_eq!(wrapped.iterations_used, plain.iterations_used);
    }

    #[test]
    fn restart_with_solved_start_returns_immediately() {
        let run = restart_fom(&Method::PolyakSubgradient, &abs(), &[0.5], &SolverConfig::new(1.0))
            .unwrap();
        assert_eq!(run.iterations_used, 0);
        assert_eq!(run.terminated, Termination::EpsReached);
        assert_eq!(run.trace.len(), 1);
    }

    #[test]
    fn restart_prox_on_square_follows_plain_trajectory() {
        let f = square();
        let cfg = SolverConfig::new(1e-2).with_rho(1.0);
        let plain = proximal_point(&f, &[4.0], &cfg).unwrap();
        let wrapped = restart_fom(&Method::ProximalPoint, &f, &[4.0], &cfg).unwrap();
        assert_eq!(xs(&wrapped), xs(&plain));
        assert!(wrapped.final_gap <= 1e-2);
        let epochs: Vec<usize> = wrapped.trace.iter().map(|r| r.restart_epoch).collect();
        assert!(epochs.windows(2).all(|w| w[0] <= w[1]));
        assert!(*epochs.last().unwrap() < epoch_count(16.0, 1e-2));
        assert!(*epochs.last().unwrap() > 0);
    }

    #[test]
    fn restart_gradient_descent_follows_plain_trajectory() {
        let f = make_power_norm(0.5, 1.5, vec![0.0]).unwrap();
        let s = f.smoothness();
        let cfg = SolverConfig::new(1e-6);
        let plain = holder_gradient_descent(&f, &[3.0], s, &cfg).unwrap();
        let wrapped = restart_fom(&Method::HolderGradientDescent { smoothness: s }, &f, &[3.0], &cfg)
            .unwrap();
        assert_eq!(xs(&wrapped), xs(&plain));
        assert_eq!(wrapped.iterations_used, plain.iterations_used);
        assert_eq!(wrapped.solution, plain.solution);
    }
}
