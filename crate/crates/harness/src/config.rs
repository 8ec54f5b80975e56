//! Experiment configuration (JSON).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    /// Binary-search identification in the probe environment.
    Identify,
    /// Ellipsoid learner mistakes against a task stream.
    Mistakes,
    /// Ellipsoid learner mistakes against the adversary, compared in the mean.
    Lowerbound,
    /// Fixed feature matrix with the center-cancelling designer.
    Fixedenv,
    /// Trajectory-feedback learner on random MDPs.
    Trajectory,
    /// Bandit -> MDP -> bandit round trips.
    Convert,
    /// Spread of a feature matrix.
    Spread,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StreamSource {
    Adversary,
    Random,
    /// JSONL file of bandit tasks, replayed in order.
    Replay(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreakStrategy {
    #[default]
    Lexicographic,
    WorstCaseOracle,
}

fn default_gamma() -> f64 {
    0.9
}

fn default_delta() -> f64 {
    0.1
}

/// One experiment. Unknown fields are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub kind: ExperimentKind,
    /// Feature dimension, or number of states for MDP kinds.
    pub d: usize,
    /// Actions per task (bandit `K` or MDP `|A|`).
    #[serde(default)]
    pub num_actions: Option<usize>,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    pub epsilon: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Demonstration horizon override (trajectory).
    #[serde(default)]
    pub horizon: Option<usize>,
    /// Mini-batch size override (trajectory).
    #[serde(default)]
    pub batch_size: Option<usize>,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub stream: Option<StreamSource>,
    #[serde(default)]
    pub tie_break: TieBreakStrategy,
    /// Rounds for random streams, episodes for the trajectory learner.
    #[serde(default)]
    pub rounds: Option<usize>,
    /// Feature columns (spread, fixedenv); generated when absent.
    #[serde(default)]
    pub features: Option<Vec<Vec<f64>>>,
    /// Seed for generated feature matrices.
    #[serde(default)]
    pub features_seed: u64,
    /// Write the adversary's task stream per seed (mistakes, lowerbound).
    #[serde(default)]
    pub record_stream: bool,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(HarnessError::io(path))?;
        Self::from_json(&text)
    }

    /// Minimal config for `kind` with the defaults above.
    pub fn new(kind: ExperimentKind, d: usize, epsilon: f64, seeds: Vec<u64>) -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            kind,
            d,
            num_actions: None,
            gamma: default_gamma(),
            epsilon,
            delta: default_delta(),
            horizon: None,
            batch_size: None,
            seeds,
            stream: None,
            tie_break: TieBreakStrategy::default(),
            rounds: None,
            features: None,
            features_seed: 0,
            record_stream: false,
            out_dir: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(HarnessError::Config(m));
        if self.schema_version != SCHEMA_VERSION {
            return fail(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return fail(format!("epsilon must be in (0, 1), got {}", self.epsilon));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return fail(format!("gamma must be in [0, 1), got {}", self.gamma));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return fail(format!("delta must be in (0, 1), got {}", self.delta));
        }
        if self.seeds.is_empty() {
            return fail("at least one seed is required".into());
        }
        let min_d = match self.kind {
            ExperimentKind::Identify | ExperimentKind::Trajectory => 2,
            ExperimentKind::Mistakes | ExperimentKind::Lowerbound | ExperimentKind::Fixedenv => 2,
            ExperimentKind::Convert | ExperimentKind::Spread => 1,
        };
        if self.d < min_d {
            return fail(format!("d must be >= {min_d} for {:?}", self.kind));
        }
        if let Some(k) = self.num_actions {
            if k < 2 {
                return fail(format!("num_actions must be >= 2, got {k}"));
            }
        }
        if self.horizon == Some(0) || self.batch_size == Some(0) || self.rounds == Some(0) {
            return fail("horizon, batch_size and rounds must be >= 1".into());
        }
        if let Some(cols) = &self.features {
            if cols.is_empty() || cols.iter().any(|c| c.len() != self.d) {
                return fail(format!("features must be nonempty columns of length d = {}", self.d));
            }
        }
        if self.kind == ExperimentKind::Spread && self.features.is_none() {
            return fail("spread needs a features matrix".into());
        }
        Ok(())
    }

    pub fn num_actions_or(&self, default: usize) -> usize {
        self.num_actions.unwrap_or(default)
    }
}

/// Parses `a..b` (end exclusive) into seeds.
pub fn parse_seed_range(text: &str) -> Result<Vec<u64>> {
    let bad = || HarnessError::Config(format!("seed range must look like a..b, got {text:?}"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().parse().map_err(|_| bad())?;
    if b <= a {
        return Err(bad());
    }
    Ok((a..b).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let c = ExperimentConfig::from_json(
            r#"{"schema_version": 1, "kind": "identify", "d": 10, "epsilon": 0.001, "seeds": [0, 1]}"#,
        )
        .unwrap();
        assert_eq!(c.kind, ExperimentKind::Identify);
        assert_eq!(c.gamma, 0.9);
        assert_eq!(c.tie_break, TieBreakStrategy::Lexicographic);
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            r#"{"schema_version": 2, "kind": "identify", "d": 10, "epsilon": 0.001, "seeds": [0]}"#,
            r#"{"schema_version": 1, "kind": "identify", "d": 10, "epsilon": 1.5, "seeds": [0]}"#,
            r#"{"schema_version": 1, "kind": "identify", "d": 10, "epsilon": 0.1, "seeds": []}"#,
            r#"{"schema_version": 1, "kind": "identify", "d": 1, "epsilon": 0.1, "seeds": [0]}"#,
            r#"{"schema_version": 1, "kind": "mistakes", "d": 3, "epsilon": 0.1, "seeds": [0], "gamma": 1.0}"#,
            r#"{"schema_version": 1, "kind": "spread", "d": 3, "epsilon": 0.1, "seeds": [0]}"#,
            r#"{"schema_version": 1, "kind": "identify", "d": 3, "epsilon": 0.1, "seeds": [0], "typo": 1}"#,
        ] {
            assert!(matches!(ExperimentConfig::from_json(text), Err(HarnessError::Config(_))), "{text}");
        }
    }

    #[test]
    fn stream_sources_parse() {
        let c = ExperimentConfig::from_json(
            r#"{"schema_version": 1, "kind": "mistakes", "d": 3, "epsilon": 0.1, "seeds": [0],
                "stream": {"replay": "tasks.jsonl"}}"#,
        )
        .unwrap();
        assert_eq!(c.stream, Some(StreamSource::Replay("tasks.jsonl".into())));
        let c = ExperimentConfig::from_json(
            r#"{"schema_version": 1, "kind": "mistakes", "d": 3, "epsilon": 0.1, "seeds": [0], "stream": "adversary"}"#,
        )
        .unwrap();
        assert_eq!(c.stream, Some(StreamSource::Adversary));
    }

    #[test]
    fn seed_ranges() {
        assert_eq!(parse_seed_range("3..6").unwrap(), vec![3, 4, 5]);
        assert!(parse_seed_range("6..3").is_err());
        assert!(parse_seed_range("x").is_err());
    }
}
