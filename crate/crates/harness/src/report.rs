//! Per-run rows, aggregates, CSV summaries and bound checks.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{HarnessError, Result};
use rirl_core::bounds::LOWER_BOUND_FACTOR;

/// Columns of `summary.csv`, in order.
pub const CSV_HEADER: [&str; 7] = [
    "seed",
    "d",
    "epsilon",
    "mistakes",
    "bound",
    "bound_satisfied",
    "final_center_error",
];

/// One seed's outcome. The meaning of `mistakes`, `bound` and
/// `final_center_error` per kind is listed in the README.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub d: usize,
    pub epsilon: f64,
    pub mistakes: usize,
    pub bound: f64,
    pub bound_satisfied: bool,
    pub final_center_error: f64,
    pub rounds: usize,
    /// Broken per-round invariants (containment, volume drop, demo mass, flags).
    pub invariant_violations: usize,
    /// Kind-specific observations, e.g. the batch margin of trajectory runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extra: Option<serde_json::Value>,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub runs: usize,
    pub mean_mistakes: f64,
    pub max_mistakes: usize,
    pub fraction_satisfied: f64,
    pub mean_final_error: f64,
    pub max_final_error: f64,
    pub invariant_violations: usize,
}

impl Aggregate {
    pub fn from_runs(runs: &[RunRecord]) -> Self {
        let n = runs.len().max(1) as f64;
        Aggregate {
            runs: runs.len(),
            mean_mistakes: runs.iter().map(|r| r.mistakes as f64).sum::<f64>() / n,
            max_mistakes: runs.iter().map(|r| r.mistakes).max().unwrap_or(0),
            fraction_satisfied: runs.iter().filter(|r| r.bound_satisfied).count() as f64 / n,
            mean_final_error: runs.iter().map(|r| r.final_center_error).sum::<f64>() / n,
            max_final_error: runs.iter().map(|r| r.final_center_error).fold(0.0, f64::max),
            invariant_violations: runs.iter().map(|r| r.invariant_violations).sum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    /// Which guarantee the `bound` column holds.
    pub bound_name: String,
    pub runs: Vec<RunRecord>,
    pub aggregate: Aggregate,
}

impl RunReport {
    pub fn new(config: ExperimentConfig, bound_name: &str, runs: Vec<RunRecord>) -> Self {
        let aggregate = Aggregate::from_runs(&runs);
        RunReport {
            config,
            bound_name: bound_name.to_string(),
            runs,
            aggregate,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(HarnessError::io(path))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text).map_err(HarnessError::io(path))
    }

    /// `summary.csv`: fixed columns, floats with 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.runs {
            w.write_record([
                r.seed.to_string(),
                r.d.to_string(),
                float17(r.epsilon),
                r.mistakes.to_string(),
                float17(r.bound),
                r.bound_satisfied.to_string(),
                float17(r.final_center_error),
            ])?;
        }
        w.flush().map_err(HarnessError::io(Path::new("summary.csv")))?;
        Ok(())
    }
}

pub fn float17(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub passed: bool,
    pub messages: Vec<String>,
}

/// Upper bounds hold per run; the lower bound holds for the mean over runs
/// (with the statistical slack); the trajectory bound holds in at least a
/// `1 - delta` fraction of runs. Invariant violations always fail.
pub fn check_bounds(report: &RunReport) -> CheckOutcome {
    let mut messages = Vec::new();
    let agg = Aggregate::from_runs(&report.runs);
    match report.config.kind {
        ExperimentKind::Lowerbound => {
            let bound = report.runs.first().map(|r| r.bound).unwrap_or(0.0);
            let need = LOWER_BOUND_FACTOR * bound;
            if agg.mean_mistakes < need {
                messages.push(format!(
                    "mean mistakes {:.4} below {LOWER_BOUND_FACTOR} x {bound} = {need:.4}",
                    agg.mean_mistakes
                ));
            }
        }
        ExperimentKind::Trajectory => {
            let need = 1.0 - report.config.delta;
            if agg.fraction_satisfied < need {
                messages.push(format!(
                    "only {:.3} of runs within the mistake bound, need {need:.3}",
                    agg.fraction_satisfied
                ));
            }
        }
        _ => {
            for r in report.runs.iter().filter(|r| !r.bound_satisfied) {
                messages.push(format!(
                    "seed {}: {} = {} vs bound {}",
                    r.seed, report.bound_name, r.mistakes, r.bound
                ));
            }
        }
    }
    for r in report.runs.iter().filter(|r| r.invariant_violations > 0) {
        messages.push(format!("seed {}: {} invariant violations", r.seed, r.invariant_violations));
    }
    CheckOutcome {
        passed: messages.is_empty(),
        messages,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(seed: u64, mistakes: usize, bound: f64) -> RunRecord {
        RunRecord {
            seed,
            d: 2,
            epsilon: 0.1,
            mistakes,
            bound,
            bound_satisfied: mistakes as f64 <= bound,
            final_center_error: 0.1,
            rounds: 10,
            invariant_violations: 0,
            extra: None,
            wall_time_ms: 1.0,
        }
    }

    #[test]
    fn upper_bounds_are_per_run() {
        let config = ExperimentConfig::new(ExperimentKind::Mistakes, 2, 0.1, vec![0, 1]);
        let ok = RunReport::new(config.clone(), "mistakes", vec![row(0, 3, 5.0), row(1, 5, 5.0)]);
        assert!(check_bounds(&ok).passed);
        let bad = RunReport::new(config, "mistakes", vec![row(0, 3, 5.0), row(1, 6, 5.0)]);
        let out = check_bounds(&bad);
        assert!(!out.passed);
        assert_eq!(out.messages.len(), 1);
    }

    #[test]
    fn lower_bound_uses_the_mean() {
        let config = ExperimentConfig::new(ExperimentKind::Lowerbound, 8, 0.01, vec![0, 1]);
        // one run below the bound, mean above 0.8 x 10
        let mut a = row(0, 4, 10.0);
        a.bound_satisfied = false;
        let b = row(1, 13, 10.0);
        assert!(check_bounds(&RunReport::new(config.clone(), "lower", vec![a.clone(), b])).passed);
        let c = row(1, 11, 10.0);
        assert!(!check_bounds(&RunReport::new(config, "lower", vec![a, c])).passed);
    }

    #[test]
    fn invariant_violations_fail() {
        let config = ExperimentConfig::new(ExperimentKind::Mistakes, 2, 0.1, vec![0]);
        let mut r = row(0, 1, 5.0);
        r.invariant_violations = 2;
        assert!(!check_bounds(&RunReport::new(config, "mistakes", vec![r])).passed);
    }

    #[test]
    fn csv_uses_seventeen_digits() {
        let config = ExperimentConfig::new(ExperimentKind::Mistakes, 2, 0.1, vec![0]);
        let report = RunReport::new(config, "mistakes", vec![row(0, 1, 5.0)]);
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(fields[2], "1.0000000000000001e-1");
        assert_eq!(fields[2].parse::<f64>().unwrap(), 0.1);
        assert_eq!(fields[5], "true");
    }
}
