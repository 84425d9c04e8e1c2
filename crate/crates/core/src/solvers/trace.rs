use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{RunResult, Termination};
use crate::linalg::norm;

pub const TRACE_COLUMNS: [&str; 9] = [
    "k",
    "restart_epoch",
    "x",
    "f",
    "grad_norm",
    "gamma",
    "f_candidate",
    "gap",
    "dist",
];

/// Everything in a [`RunResult`] except the trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub terminated: Termination,
    pub iterations_used: usize,
    pub epsilon: f64,
    pub final_gap: f64,
    pub solution: Vec<f64>,
    pub records: usize,
}

impl RunResult {
    pub fn metadata(&self) -> RunMetadata {
        RunMetadata {
            terminated: self.terminated,
            iterations_used: self.iterations_used,
            epsilon: self.epsilon,
            final_gap: self.final_gap,
            solution: self.solution.clone(),
            records: self.trace.len(),
        }
    }

    /// One row per record; coordinates of `x` are joined with `;`.
    pub fn write_trace_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(TRACE_COLUMNS)?;
        for r in &self.trace {
            let x = r
                .x
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(";");
            w.write_record([
                r.k.to_string(),
                r.restart_epoch.to_string(),
                x,
                r.f.to_string(),
                norm(&r.g).to_string(),
                r.gamma.to_string(),
                r.f_candidate.to_string(),
                r.gap.to_string(),
                r.dist.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use crate::problems::make_power_norm;
    use crate::solvers::{polyak_subgradient, SolverConfig};

    #[test]
    fn csv_has_fixed_columns() {
        let f = make_power_norm(1.0, 2.0, vec![1.0, -1.0]).unwrap();
        let run = polyak_subgradient(&f, &[2.0, -1.0], &SolverConfig::new(0.1)).unwrap();
        let mut buf = Vec::new();
        run.write_trace_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "k,restart_epoch,x,f,grad_norm,gamma,f_candidate,gap,dist"
        );
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first[0], "0");
        assert_eq!(first[2], "2;-1");
        assert_eq!(first[3], "1");
        assert_eq!(text.lines().count(), run.trace.len() + 1);

        let meta = serde_json::to_value(run.metadata()).unwrap();
        assert_eq!(meta["terminated"], "eps-reached");
    }
}
