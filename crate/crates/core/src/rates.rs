//! Iteration-bound formulas `K(Δ0, ε, α)`, the two lifting substitutions, the
//! restart sums they induce, and the oracle-complexity lower bounds.
//!
//! Everything here is plain arithmetic on a [`RateQuery`]. Counts are real
//! valued and never rounded; callers that compare against observed integer
//! counts apply the ceiling themselves.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::solvers::epoch_count;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RateError {
    #[error("no rate is known for {0}")]
    UnsupportedCell(String),
    #[error("missing parameter `{0}`")]
    MissingParameter(&'static str),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
}

pub type Result<T> = std::result::Result<T, RateError>;

/// Parameters of a rate evaluation. Only the fields a formula reads need to be set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateQuery {
    /// `f(x0) − f*`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
}

macro_rules! setters {
    ($($name:ident => $field:ident),* $(,)?) => {
        $(
            pub fn $name(mut self, v: f64) -> Self {
                self.$field = Some(v);
                self
            }
        )*
    };
}

impl RateQuery {
    pub fn new() -> Self {
        Self::default()
    }

    setters! {
        delta0 => delta0,
        epsilon => epsilon,
        alpha => alpha,
        p => p,
        q => q,
        lipschitz => lipschitz,
        eta => eta,
        radius => radius,
        rho => rho,
    }

    /// Checks every field that is present.
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        let positive = [
            ("delta0", self.delta0),
            ("epsilon", self.epsilon),
            ("alpha", self.alpha),
            ("L", self.lipschitz),
            ("rho", self.rho),
        ];
        for (name, v) in positive {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    bad.push(format!("{name} = {v} must be positive and finite"));
                }
            }
        }
        if let Some(d) = self.radius {
            if !(d >= 0.0 && d.is_finite()) {
                bad.push(format!("D = {d} must be nonnegative and finite"));
            }
        }
        if let Some(p) = self.p {
            if !(p >= 1.0 && p.is_finite()) {
                bad.push(format!("p = {p} must be at least 1"));
            }
        }
        if let Some(eta) = self.eta {
            if !(0.0..=1.0).contains(&eta) {
                bad.push(format!("eta = {eta} must lie in [0, 1]"));
            }
        }
        if let Some(q) = self.q {
            if !q.is_finite() {
                bad.push(format!("q = {q} must be finite"));
            } else if let Some(p) = self.p {
                if q <= p {
                    bad.push(format!("q = {q} must exceed p = {p}"));
                }
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(RateError::InvalidQuery(bad.join("; ")))
        }
    }

    fn need(&self, name: &'static str) -> Result<f64> {
        let v = match name {
            "delta0" => self.delta0,
            "epsilon" => self.epsilon,
            "alpha" => self.alpha,
            "p" => self.p,
            "q" => self.q,
            "L" => self.lipschitz,
            "eta" => self.eta,
            "D" => self.radius,
            "rho" => self.rho,
            _ => unreachable!("unknown rate parameter {name}"),
        };
        v.ok_or(RateError::MissingParameter(name))
    }
}

/// An iteration count, flagged when it comes from an `O(·)` entry evaluated
/// with unit constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateBound {
    pub iterations: f64,
    pub asymptotic_only: bool,
}

impl RateBound {
    pub fn exact(iterations: f64) -> Self {
        Self {
            iterations,
            asymptotic_only: false,
        }
    }

    pub fn asymptotic(iterations: f64) -> Self {
        Self {
            iterations,
            asymptotic_only: true,
        }
    }
}

/// A rate function `K`, reading `delta0`, `epsilon` and `alpha` (plus any
/// constants it needs) from the query.
pub trait RateFn {
    fn eval(&self, q: &RateQuery) -> Result<RateBound>;
}

impl<F> RateFn for F
where
    F: Fn(&RateQuery) -> Result<RateBound>,
{
    fn eval(&self, q: &RateQuery) -> Result<RateBound> {
        self(q)
    }
}

/// `(Δ0 − ε)/(ρα²)` for the proximal point method under sharp growth.
pub fn k_prox_sharp(q: &RateQuery) -> Result<RateBound> {
    let (delta0, eps) = (q.need("delta0")?, q.need("epsilon")?);
    let (rho, alpha) = (q.need("rho")?, q.need("alpha")?);
    if delta0 <= eps {
        return Ok(RateBound::exact(0.0));
    }
    Ok(RateBound::exact((delta0 - eps) / (rho * alpha * alpha)))
}

/// `8L²/(αε)` for the Polyak method under quadratic growth, `L` bounding subgradient norms.
pub fn k_subgrad_quadratic(q: &RateQuery) -> Result<RateBound> {
    let (l, alpha, eps) = (q.need("L")?, q.need("alpha")?, q.need("epsilon")?);
    Ok(RateBound::exact(8.0 * l * l / (alpha * eps)))
}

/// `(4L²/α²)·log₂(Δ0/ε)` for the Polyak method under sharp growth.
pub fn k_subgrad_sharp(q: &RateQuery) -> Result<RateBound> {
    let (l, alpha) = (q.need("L")?, q.need("alpha")?);
    let (delta0, eps) = (q.need("delta0")?, q.need("epsilon")?);
    if delta0 <= eps {
        return Ok(RateBound::exact(0.0));
    }
    Ok(RateBound::exact(4.0 * l * l / (alpha * alpha) * (delta0 / eps).log2()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableMethod {
    Prox,
    Subgrad,
    Bundle,
    Gd,
    Universal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    General,
    Quadratic,
    Sharp,
}

impl TableMethod {
    pub const ALL: [TableMethod; 5] = [
        TableMethod::Prox,
        TableMethod::Subgrad,
        TableMethod::Bundle,
        TableMethod::Gd,
        TableMethod::Universal,
    ];

    fn as_str(self) -> &'static str {
        match self {
            TableMethod::Prox => "prox",
            TableMethod::Subgrad => "subgrad",
            TableMethod::Bundle => "bundle",
            TableMethod::Gd => "gd",
            TableMethod::Universal => "universal",
        }
    }
}

impl Regime {
    pub const ALL: [Regime; 3] = [Regime::General, Regime::Quadratic, Regime::Sharp];

    fn as_str(self) -> &'static str {
        match self {
            Regime::General => "general",
            Regime::Quadratic => "quadratic",
            Regime::Sharp => "sharp",
        }
    }
}

impl fmt::Display for TableMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TableMethod {
    type Err = RateError;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| RateError::InvalidQuery(format!("unknown method `{s}`")))
    }
}

impl FromStr for Regime {
    type Err = RateError;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| RateError::InvalidQuery(format!("unknown regime `{s}`")))
    }
}

/// `ln(Δ0/ε)`, clamped at zero once the target is already met.
fn log_ratio(q: &RateQuery) -> Result<f64> {
    let (delta0, eps) = (q.need("delta0")?, q.need("epsilon")?);
    Ok((delta0 / eps).ln().max(0.0))
}

/// The known rate for a (method, regime) pair. Cells with an explicit-constant
/// formula use it; the rest evaluate their `O(·)` expression with constant 1
/// and natural logarithms, flagged `asymptotic_only`.
pub fn k_table(method: TableMethod, regime: Regime, q: &RateQuery) -> Result<RateBound> {
    use Regime::*;
    use TableMethod::*;
    let eps = || q.need("epsilon");
    let alpha = || q.need("alpha");
    let value = match (method, regime) {
        (Prox, Sharp) => return k_prox_sharp(q),
        (Subgrad, Quadratic) => return k_subgrad_quadratic(q),
        (Subgrad, Sharp) => return k_subgrad_sharp(q),
        (Prox | Gd, General) => 1.0 / eps()?,
        (Prox | Gd, Quadratic) => log_ratio(q)? / alpha()?,
        (Subgrad, General) => eps()?.powi(-2),
        (Bundle, General) => eps()?.powi(-3),
        (Bundle, Quadratic) => 1.0 / (eps()? * alpha()?.powi(2)),
        (Universal, General) => 1.0 / eps()?.sqrt(),
        (Universal, Quadratic) => log_ratio(q)? / alpha()?.sqrt(),
        (Bundle | Gd | Universal, Sharp) => {
            return Err(RateError::UnsupportedCell(format!("{method} under {regime} growth")))
        }
    };
    Ok(RateBound::asymptotic(value))
}

/// The catalogue of named rate functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Rate {
    ProxSharp,
    SubgradQuadratic,
    SubgradSharp,
    Table(TableMethod, Regime),
}

impl Rate {
    /// Every named rate, including empty table cells.
    pub fn all() -> Vec<Rate> {
        let mut out = vec![Rate::ProxSharp, Rate::SubgradQuadratic, Rate::SubgradSharp];
        for m in TableMethod::ALL {
            for r in Regime::ALL {
                out.push(Rate::Table(m, r));
            }
        }
        out
    }

    /// The growth exponent `p` the rate assumes: 1 for sharp, 2 for quadratic,
    /// none for the general setting.
    pub fn growth_exponent(&self) -> Option<f64> {
        match self {
            Rate::ProxSharp | Rate::SubgradSharp | Rate::Table(_, Regime::Sharp) => Some(1.0),
            Rate::SubgradQuadratic | Rate::Table(_, Regime::Quadratic) => Some(2.0),
            Rate::Table(_, Regime::General) => None,
        }
    }
}

impl RateFn for Rate {
    fn eval(&self, q: &RateQuery) -> Result<RateBound> {
        match *self {
            Rate::ProxSharp => k_prox_sharp(q),
            Rate::SubgradQuadratic => k_subgrad_quadratic(q),
            Rate::SubgradSharp => k_subgrad_sharp(q),
            Rate::Table(m, r) => k_table(m, r, q),
        }
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rate::ProxSharp => f.write_str("k_prox_sharp"),
            Rate::SubgradQuadratic => f.write_str("k_subgrad_quadratic"),
            Rate::SubgradSharp => f.write_str("k_subgrad_sharp"),
            Rate::Table(m, r) => write!(f, "table:{m}:{r}"),
        }
    }
}

impl FromStr for Rate {
    type Err = RateError;

    /// Accepts `k_prox_sharp`, `k_subgrad_quadratic`, `k_subgrad_sharp`
    /// (the `k_` prefix is optional) and `table:<method>:<regime>`.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(rest) = s.strip_prefix("table:") {
            let (m, r) = rest
                .split_once(':')
                .ok_or_else(|| RateError::InvalidQuery(format!("expected table:<method>:<regime>, got `{s}`")))?;
            return Ok(Rate::Table(m.parse()?, r.parse()?));
        }
        match s.strip_prefix("k_").unwrap_or(s) {
            "prox_sharp" => Ok(Rate::ProxSharp),
            "subgrad_quadratic" => Ok(Rate::SubgradQuadratic),
            "subgrad_sharp" => Ok(Rate::SubgradSharp),
            _ => Err(RateError::InvalidQuery(format!("unknown rate `{s}`"))),
        }
    }
}

impl TryFrom<String> for Rate {
    type Error = RateError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Rate> for String {
    fn from(r: Rate) -> String {
        r.to_string()
    }
}

/// `α ← ε/D^p`
pub fn general_alpha(q: &RateQuery) -> Result<f64> {
    let (eps, d, p) = (q.need("epsilon")?, q.need("D")?, q.need("p")?);
    Ok(eps / d.powf(p))
}

/// `α ← α^{p/q} ε^{1−p/q}`; requires `q > p`.
pub fn growth_alpha(q: &RateQuery) -> Result<f64> {
    let (alpha, eps) = (q.need("alpha")?, q.need("epsilon")?);
    let ratio = growth_ratio(q)?;
    Ok(alpha.powf(ratio) * eps.powf(1.0 - ratio))
}

fn growth_ratio(q: &RateQuery) -> Result<f64> {
    let (p, target) = (q.need("p")?, q.need("q")?);
    if target <= p {
        return Err(RateError::InvalidQuery(format!("q = {target} must exceed p = {p}")));
    }
    Ok(p / target)
}

/// Evaluates `K` with `α` replaced by `ε/D^p`: the general-setting rate
/// implied by a rate under `(α, p)` growth.
pub fn lift_general(k: &dyn RateFn, q: &RateQuery) -> Result<RateBound> {
    let alpha = general_alpha(q)?;
    k.eval(&RateQuery { alpha: Some(alpha), ..*q })
}

/// Evaluates `K` with `α` replaced by `α^{p/q}ε^{1−p/q}`: the rate under
/// `(α, q)` growth implied by a rate under `(α, p)` growth.
pub fn lift_growth(k: &dyn RateFn, q: &RateQuery) -> Result<RateBound> {
    let alpha = growth_alpha(q)?;
    k.eval(&RateQuery { alpha: Some(alpha), ..*q })
}

/// Per-epoch queries `(2^{n+1}ε, 2^n ε, α_n)` for `n < N`, `N = ⌈log₂(Δ0/ε)⌉`.
fn restart_terms(
    k: &dyn RateFn,
    q: &RateQuery,
    alpha_n: impl Fn(f64) -> Result<f64>,
) -> Result<RateBound> {
    let (delta0, eps) = (q.need("delta0")?, q.need("epsilon")?);
    let mut total = RateBound::exact(0.0);
    for n in 0..epoch_count(delta0, eps) {
        let target = eps * 2f64.powi(n as i32);
        let term = k.eval(&RateQuery {
            delta0: Some(2.0 * target),
            epsilon: Some(target),
            alpha: Some(alpha_n(target)?),
            ..*q
        })?;
        total.iterations += term.iterations;
        total.asymptotic_only |= term.asymptotic_only;
    }
    Ok(total)
}

/// `Σ_{n<N} K(2^{n+1}ε, 2^n ε, 2^n ε/D^p)`: the cost of restarting a method
/// with rate `K` until an `ε`-minimizer is found, with no growth assumed.
pub fn restart_sum_general(k: &dyn RateFn, q: &RateQuery) -> Result<RateBound> {
    let (d, p) = (q.need("D")?, q.need("p")?);
    let scale = d.powf(p);
    restart_terms(k, q, |target| Ok(target / scale))
}

/// `Σ_{n<N} K(2^{n+1}ε, 2^n ε, α^{p/q}(2^n ε)^{1−p/q})`: the same cost under
/// `(α, q)` growth.
pub fn restart_sum_growth(k: &dyn RateFn, q: &RateQuery) -> Result<RateBound> {
    let ratio = growth_ratio(q)?;
    let alpha = q.need("alpha")?;
    restart_terms(k, q, |target| Ok(alpha.powf(ratio) * target.powf(1.0 - ratio)))
}

/// `M²D²/(16ε²)` subgradient evaluations are needed for `M`-Lipschitz problems.
pub fn lower_bound_nonsmooth(m: f64, d: f64, epsilon: f64) -> RateBound {
    RateBound::exact(m * m * d * d / (16.0 * epsilon * epsilon))
}

/// `√(3LD²/(32ε))` iterations are needed for `L`-smooth problems.
pub fn lower_bound_smooth(l: f64, d: f64, epsilon: f64) -> RateBound {
    RateBound::exact((3.0 * l * d * d / (32.0 * epsilon)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn prox_sharp_examples() {
        let q = RateQuery::new().delta0(10.0).epsilon(1.0).rho(1.0).alpha(1.0);
        assert_eq!(k_prox_sharp(&q).unwrap(), RateBound::exact(9.0));
        let q = RateQuery::new().delta0(1.0).epsilon(1.0).rho(1.0).alpha(1.0);
        assert_eq!(k_prox_sharp(&q).unwrap().iterations, 0.0);
        let q = RateQuery::new().delta0(5.0).epsilon(1.0).rho(2.0).alpha(0.5);
        assert_eq!(k_prox_sharp(&q).unwrap().iterations, 8.0);
    }

    #[test]
    fn subgrad_examples() {
        let q = RateQuery::new().lipschitz(1.0).alpha(1.0).epsilon(0.01);
        assert!(close(k_subgrad_quadratic(&q).unwrap().iterations, 800.0));
        let q = RateQuery::new().lipschitz(1.0).alpha(1.0).epsilon(8.0);
        assert_eq!(k_subgrad_quadratic(&q).unwrap().iterations, 1.0);

        let q = RateQuery::new().lipschitz(1.0).alpha(1.0).epsilon(0.5).delta0(4.0);
        assert_eq!(k_subgrad_sharp(&q).unwrap().iterations, 12.0);
        let q = RateQuery::new().lipschitz(1.0).alpha(1.0).epsilon(0.5).delta0(0.5);
        assert_eq!(k_subgrad_sharp(&q).unwrap().iterations, 0.0);
        let q = RateQuery::new().lipschitz(2.0).alpha(1.0).epsilon(0.5).delta0(1.0);
        assert_eq!(k_subgrad_sharp(&q).unwrap().iterations, 16.0);
    }

    #[test]
    fn missing_and_invalid_parameters() {
        let q = RateQuery::new().alpha(1.0).epsilon(0.01);
        assert_eq!(k_subgrad_quadratic(&q), Err(RateError::MissingParameter("L")));
        let q = RateQuery::new().epsilon(-1.0).p(0.5).q(0.2);
        let Err(RateError::InvalidQuery(msg)) = q.validate() else {
            panic!("expected invalid query")
        };
        assert!(msg.contains("epsilon") && msg.contains("p = 0.5") && msg.contains("q = 0.2"));
    }

    #[test]
    fn table_cells() {
        let q = RateQuery::new().epsilon(0.1);
        let b = k_table(TableMethod::Prox, Regime::General, &q).unwrap();
        assert!(close(b.iterations, 10.0) && b.asymptotic_only);

        let q = RateQuery::new().alpha(4.0).epsilon(1.0).delta0(std::f64::consts::E);
        let b = k_table(TableMethod::Universal, Regime::Quadratic, &q).unwrap();
        assert!(close(b.iterations, 0.5) && b.asymptotic_only);

        for m in [TableMethod::Bundle, TableMethod::Gd, TableMethod::Universal] {
            assert!(matches!(
                k_table(m, Regime::Sharp, &q),
                Err(RateError::UnsupportedCell(_))
            ));
        }
        let q = RateQuery::new().lipschitz(1.0).alpha(1.0).epsilon(0.01);
        let b = k_table(TableMethod::Subgrad, Regime::Quadratic, &q).unwrap();
        assert!(!b.asymptotic_only);
    }

    #[test]
    fn rate_names_round_trip() {
        for r in Rate::all() {
            assert_eq!(r.to_string().parse::<Rate>().unwrap(), r);
            let json = serde_json::to_string(&r).unwrap();
            assert_eq!(serde_json::from_str::<Rate>(&json).unwrap(), r);
        }
        assert_eq!("subgrad_sharp".parse::<Rate>().unwrap(), Rate::SubgradSharp);
        assert!("table:prox".parse::<Rate>().is_err());
        assert!("newton".parse::<Rate>().is_err());
    }

    #[test]
    fn lifting_examples() {
        let (l, d, eps) = (1.5, 2.0, 0.01);
        let q = RateQuery::new().lipschitz(l).radius(d).epsilon(eps).p(2.0);
        let lifted = lift_general(&k_subgrad_quadratic, &q).unwrap();
        assert!(close(lifted.iterations, 8.0 * l * l * d * d / (eps * eps)));

        let q = RateQuery::new().lipschitz(l).radius(d).epsilon(eps).p(1.0).delta0(1.0);
        let lifted = lift_general(&k_subgrad_sharp, &q).unwrap();
        let want = 4.0 * l * l * d * d / (eps * eps) * (1.0 / eps).log2();
        assert!(close(lifted.iterations, want));

        let constant = |_: &RateQuery| Ok(RateBound::exact(7.0));
        assert_eq!(lift_general(&constant, &q).unwrap().iterations, 7.0);

        let alpha = 0.3;
        let q = RateQuery::new().lipschitz(l).alpha(alpha).epsilon(eps).delta0(1.0).p(1.0).q(2.0);
        let lifted = lift_growth(&k_subgrad_sharp, &q).unwrap();
        let want = 4.0 * l * l / (alpha * eps) * (1.0 / eps).log2();
        assert!(close(lifted.iterations, want));

        assert!(lift_growth(&k_subgrad_sharp, &q.q(1.0)).is_err());

        for (p, target) in [(1.0, 2.0), (1.5, 4.0), (2.0, 7.0)] {
            let q = RateQuery::new().alpha(eps).epsilon(eps).p(p).q(target);
            assert!(close(growth_alpha(&q).unwrap(), eps));
        }
    }

    #[test]
    fn restart_sums_match_loops() {
        let (d, rho, eps) = (3.0, 0.5, 1e-3);
        for delta0 in [2e-3, 0.1, 7.3] {
            let q = RateQuery::new().delta0(delta0).epsilon(eps).radius(d).p(1.0).rho(rho);
            let n = epoch_count(delta0, eps);
            let brute: f64 = (0..n).map(|i| d * d / (rho * 2f64.powi(i as i32) * eps)).sum();
            let sum = restart_sum_general(&k_prox_sharp, &q).unwrap();
            assert!(close(sum.iterations, brute));
            assert!(sum.iterations <= 2.0 * d * d / (rho * eps));

            let alpha = 0.7;
            let q = q.alpha(alpha).q(2.0);
            let sum = restart_sum_growth(&k_prox_sharp, &q).unwrap();
            assert!(close(sum.iterations, n as f64 / (rho * alpha)));
        }

        // one epoch is a single substituted term
        let q = RateQuery::new().delta0(1.5).epsilon(1.0).radius(2.0).p(1.0).rho(1.0);
        let single = k_prox_sharp(&q.delta0(2.0).alpha(0.5)).unwrap();
        assert_eq!(restart_sum_general(&k_prox_sharp, &q).unwrap(), single);

        let q = RateQuery::new().delta0(0.5).epsilon(1.0).radius(2.0).p(1.0).rho(1.0);
        assert_eq!(restart_sum_general(&k_prox_sharp, &q).unwrap().iterations, 0.0);
    }

    #[test]
    fn restart_of_accelerated_rate_is_root_order() {
        // K = √(L/α)·log₂(Δ0/ε): each epoch has log₂2 = 1, so the sum is
        // Σ √(L D² / (2^n ε)), bounded by √(LD²/ε)/(1 − 2^{−1/2}).
        let accel = |q: &RateQuery| -> Result<RateBound> {
            let (l, a) = (q.need("L")?, q.need("alpha")?);
            let (d0, e) = (q.need("delta0")?, q.need("epsilon")?);
            Ok(RateBound::asymptotic((l / a).sqrt() * (d0 / e).log2()))
        };
        let (l, d) = (4.0, 2.0);
        for eps in [1e-2, 1e-4, 1e-6] {
            let q = RateQuery::new().lipschitz(l).radius(d).p(2.0).epsilon(eps).delta0(1e3);
            let sum = restart_sum_general(&accel, &q).unwrap();
            let scale = (l * d * d / eps).sqrt();
            assert!(sum.asymptotic_only);
            assert!(sum.iterations <= scale / (1.0 - 0.5f64.sqrt()) * (1.0 + 1e-12));
            assert!(sum.iterations >= scale);
        }
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(lower_bound_nonsmooth(1.0, 1.0, 0.25).iterations, 1.0);
        assert_eq!(lower_bound_nonsmooth(2.0, 1.0, 0.5).iterations, 1.0);
        assert!(lower_bound_nonsmooth(1.0, 1.0, 1e300).iterations < 1e-300);
        assert!(close(lower_bound_smooth(32.0 / 3.0, 1.0, 1.0).iterations, 1.0));
        assert_eq!(lower_bound_smooth(1.0, 0.0, 1.0).iterations, 0.0);
        assert_eq!(lower_bound_smooth(3.0, 4.0, 0.5).iterations, 3.0);
    }
}
