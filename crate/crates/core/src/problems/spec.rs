//! JSON form of a problem definition.

use serde::{Deserialize, Serialize};

use super::{make_piecewise_max, make_power_norm, Objective, ProblemError, ProblemInstance, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    PowerNorm,
    PiecewiseMax,
}

/// `{kind, alpha, p, x_star, dimension, slopes, offsets, D}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    pub x_star: Vec<f64>,
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slopes: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offsets: Option<Vec<f64>>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

impl ProblemSpec {
    pub fn power_norm(alpha: f64, p: f64, x_star: Vec<f64>) -> Self {
        Self {
            kind: ProblemKind::PowerNorm,
            alpha: Some(alpha),
            p: Some(p),
            dimension: x_star.len(),
            x_star,
            slopes: None,
            offsets: None,
            radius: None,
        }
    }

    pub fn piecewise_max(slopes: Vec<Vec<f64>>, offsets: Vec<f64>, x_star: Vec<f64>) -> Self {
        Self {
            kind: ProblemKind::PiecewiseMax,
            alpha: None,
            p: None,
            dimension: x_star.len(),
            x_star,
            slopes: Some(slopes),
            offsets: Some(offsets),
            radius: None,
        }
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = Some(radius);
        self
    }

    pub fn build(&self) -> Result<ProblemInstance> {
        if self.x_star.len() != self.dimension {
            return Err(ProblemError::DimensionMismatch {
                expected: self.dimension,
                got: self.x_star.len(),
            });
        }
        let missing = |name: &str| ProblemError::InvalidParameter(format!("missing field `{name}`"));
        let inst = match self.kind {
            ProblemKind::PowerNorm => make_power_norm(
                self.alpha.ok_or_else(|| missing("alpha"))?,
                self.p.ok_or_else(|| missing("p"))?,
                self.x_star.clone(),
            )?,
            ProblemKind::PiecewiseMax => make_piecewise_max(
                self.slopes.clone().ok_or_else(|| missing("slopes"))?,
                self.offsets.clone().ok_or_else(|| missing("offsets"))?,
                self.x_star.clone(),
            )?,
        };
        match self.radius {
            Some(d) => inst.with_growth_radius(d),
            None => Ok(inst),
        }
    }
}

impl ProblemInstance {
    pub fn to_spec(&self) -> ProblemSpec {
        let spec = match self.objective() {
            Objective::PowerNorm { alpha, p } => {
                ProblemSpec::power_norm(*alpha, *p, self.x_star().to_vec())
            }
            Objective::PiecewiseMax { slopes, offsets } => {
                ProblemSpec::piecewise_max(slopes.clone(), offsets.clone(), self.x_star().to_vec())
            }
        };
        spec.with_radius(self.growth_radius())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_power_norm_document() {
        let doc = r#"{"kind":"power_norm","alpha":0.5,"p":1.5,"x_star":[0,0],"dimension":2,"D":3}"#;
        let spec: ProblemSpec = serde_json::from_str(doc).unwrap();
        let f = spec.build().unwrap();
        assert_eq!(f.dimension(), 2);
        assert_eq!(f.growth_radius(), 3.0);
        assert_eq!(f.smoothness().exponent, 0.5);
        assert_eq!(f.to_spec(), spec);
    }

    #[test]
    fn rejects_dimension_disagreement_and_missing_fields() {
        let mut spec = ProblemSpec::power_norm(1.0, 1.0, vec![0.0]);
        spec.dimension = 2;
        assert!(matches!(spec.build(), Err(ProblemError::DimensionMismatch { .. })));

        let doc = r#"{"kind":"piecewise_max","x_star":[0],"dimension":1,"slopes":[[1],[-1]]}"#;
        let spec: ProblemSpec = serde_json::from_str(doc).unwrap();
        assert!(matches!(spec.build(), Err(ProblemError::InvalidParameter(_))));

        let doc = r#"{"kind":"power_norm","alpha":1,"p":1,"x_star":[0],"dimension":1,"beta":2}"#;
        assert!(serde_json::from_str::<ProblemSpec>(doc).is_err());
    }
}
