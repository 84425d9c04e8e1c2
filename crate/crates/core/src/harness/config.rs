//! Experiment configuration documents.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{HarnessError, Result};
use crate::problems::{ProblemInstance, ProblemSpec, SmoothnessDescriptor};
use crate::rates::{Rate, RateQuery};
use crate::solvers::{Method, SolverConfig, DEFAULT_MAX_ITER};

/// Environment variable that, when set, prefixes relative output directories.
pub const OUTPUT_ROOT_ENV: &str = "HOLDER_LIFT_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverId {
    #[serde(alias = "prox")]
    ProximalPoint,
    #[serde(alias = "polyak", alias = "subgrad")]
    PolyakSubgradient,
    #[serde(alias = "gd")]
    HolderGradientDescent,
}

/// How a rate is turned into a prediction for the run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    /// `K(Δ0, ε, α)` as is.
    #[default]
    None,
    /// `α ← ε/D^p`
    LiftGeneral,
    /// `α ← α^{p/q}ε^{1−p/q}`
    LiftGrowth,
    /// Restart sum with `α_n = 2^n ε/D^p`.
    RestartGeneral,
    /// Restart sum with `α_n = α^{p/q}(2^n ε)^{1−p/q}`.
    RestartGrowth,
}

/// A rate to compare against the run. Fields left out of `query` are filled
/// from the instance and the run: `delta0 = f(x0) − f*`, `epsilon`, `alpha`
/// and `p` from the growth descriptor, `L = sup‖g‖`, `eta`, `D = ‖x0 − x*‖`,
/// and `rho`. For lifted and restarted predictions `p` is the rate's own
/// growth exponent and `q` the instance's.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Prediction {
    pub rate: Rate,
    #[serde(default)]
    pub transform: Transform,
    #[serde(default)]
    pub query: RateQuery,
}

fn default_max_iter() -> usize {
    DEFAULT_MAX_ITER
}

fn default_rho() -> f64 {
    1.0
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub solver: SolverId,
    /// Step-size descriptor for gradient descent and the envelope models;
    /// defaults to the instance's own.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothness: Option<SmoothnessDescriptor>,
    #[serde(default)]
    pub restart: bool,
    pub x0: Vec<f64>,
    pub epsilon: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "default_true")]
    pub record_trace: bool,
    #[serde(default)]
    pub predictions: Vec<Prediction>,
    /// Build and certify the auxiliary envelope of the trace (1-D only).
    #[serde(default)]
    pub envelope: bool,
    pub output_dir: PathBuf,
    /// Seed for the sampled smoothness certificate.
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| HarnessError::Json(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs always serialize")
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig::new(self.epsilon)
            .with_max_iter(self.max_iter)
            .with_rho(self.rho)
            .with_record_trace(self.record_trace)
    }

    /// The descriptor used for step sizes and envelope models.
    pub fn descriptor(&self, inst: &ProblemInstance) -> SmoothnessDescriptor {
        self.smoothness.unwrap_or_else(|| inst.smoothness())
    }

    pub fn method(&self, inst: &ProblemInstance) -> Method {
        match self.solver {
            SolverId::ProximalPoint => Method::ProximalPoint,
            SolverId::PolyakSubgradient => Method::PolyakSubgradient,
            SolverId::HolderGradientDescent => Method::HolderGradientDescent {
                smoothness: self.descriptor(inst),
            },
        }
    }

    /// `output_dir`, placed under `$HOLDER_LIFT_OUT` when that is set and the
    /// directory is relative.
    pub fn resolved_output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_ROOT_ENV) {
            Some(root) if self.output_dir.is_relative() => Path::new(&root).join(&self.output_dir),
            _ => self.output_dir.clone(),
        }
    }

    /// Builds the instance, reporting every invalid field at once.
    pub fn validate(&self) -> Result<ProblemInstance> {
        let mut bad = Vec::new();
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            bad.push(format!("epsilon: {} must be positive", self.epsilon));
        }
        if self.max_iter < 1 {
            bad.push("max_iter: must be at least 1".to_string());
        }
        if !(self.rho.is_finite() && self.rho > 0.0) {
            bad.push(format!("rho: {} must be positive", self.rho));
        }
        if self.output_dir.as_os_str().is_empty() {
            bad.push("output_dir: must not be empty".to_string());
        }
        if let Some(s) = self.smoothness {
            if let Err(e) = s.validate() {
                bad.push(format!("smoothness: {e}"));
            }
        }
        let inst = match self.problem.build() {
            Ok(inst) => Some(inst),
            Err(e) => {
                bad.push(format!("problem: {e}"));
                None
            }
        };
        if let Some(inst) = &inst {
            if self.x0.len() != inst.dimension() {
                bad.push(format!(
                    "x0: has {} coordinates, problem dimension is {}",
                    self.x0.len(),
                    inst.dimension()
                ));
            }
            if self.x0.iter().any(|v| !v.is_finite()) {
                bad.push("x0: coordinates must be finite".to_string());
            }
            match self.solver {
                SolverId::ProximalPoint if !inst.has_prox() => {
                    bad.push("solver: this problem has no prox implementation".to_string());
                }
                SolverId::HolderGradientDescent => {
                    let s = self.descriptor(inst);
                    if s.exponent == 0.0 || !s.constant.is_finite() {
                        bad.push(
                            "smoothness: gradient descent needs eta > 0 and a finite L".to_string(),
                        );
                    }
                }
                _ => {}
            }
            if self.envelope && inst.dimension() != 1 {
                bad.push("envelope: certification is one-dimensional only".to_string());
            }
        }
        for (i, p) in self.predictions.iter().enumerate() {
            if let Err(e) = p.query.validate() {
                bad.push(format!("predictions[{i}].query: {e}"));
            }
            if matches!(p.transform, Transform::LiftGeneral | Transform::RestartGeneral | Transform::LiftGrowth | Transform::RestartGrowth)
                && p.rate.growth_exponent().is_none()
                && p.query.p.is_none()
            {
                bad.push(format!("predictions[{i}]: rate {} assumes no growth, so it cannot be lifted", p.rate));
            }
        }
        match (bad.is_empty(), inst) {
            (true, Some(inst)) => Ok(inst),
            _ => Err(HarnessError::InvalidConfig(bad)),
        }
    }
}
