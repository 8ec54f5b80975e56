use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bandit::{spread, BanditTask};
use crate::oracles::HumanOracle;
use crate::reward_space::TaskReward;
use crate::{Error, Result};

/// Task reward that cancels the learner's estimate: `R_t = -c_t`.
pub fn designer_next(center: &[f64]) -> TaskReward {
    TaskReward(center.iter().map(|v| -v).collect())
}

/// Designer for a fixed environment: every task shares the feature matrix `X`
/// and only the reward changes.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedEnvDesigner {
    features: DMatrix<f64>,
    spread: f64,
}

impl FixedEnvDesigner {
    /// Fails with [`Error::DegenerateFeatures`] when `spread(X) = 0`.
    pub fn new(features: DMatrix<f64>) -> Result<Self> {
        // validates shape and column norms
        BanditTask::new(features.clone(), TaskReward::zeros(features.nrows()))?;
        let spread = spread(&features);
        if spread <= 0.0 {
            return Err(Error::DegenerateFeatures);
        }
        Ok(FixedEnvDesigner { features, spread })
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn spread(&self) -> f64 {
        self.spread
    }

    pub fn next_task(&self, center: &[f64]) -> Result<BanditTask> {
        if center.len() != self.features.nrows() {
            return Err(Error::InvalidInput("center dimension mismatch".into()));
        }
        BanditTask::new(self.features.clone(), designer_next(center))
    }
}

/// Result of probing a center against the hidden reward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeOutcome {
    /// `|c - theta_star|_inf <= epsilon`.
    Certificate,
    /// A task with `R = -c` and columns `[0, e_j]`: the learner is indifferent
    /// between the two actions, but one of them loses more than `epsilon`.
    Forcing { coordinate: usize, task: BanditTask },
}

impl HumanOracle {
    /// Checks whether `center` is within `epsilon` of the hidden reward in every
    /// coordinate and otherwise returns a task that exposes the largest gap.
    pub fn probe(&self, center: &[f64]) -> Result<ProbeOutcome> {
        let theta = self.reveal_theta_star().as_slice();
        if center.len() != theta.len() {
            return Err(Error::InvalidInput("center dimension mismatch".into()));
        }
        let mut worst = None;
        let mut gap = self.epsilon();
        for (j, (c, t)) in center.iter().zip(theta).enumerate() {
            if (c - t).abs() > gap {
                gap = (c - t).abs();
                worst = Some(j);
            }
        }
        let Some(j) = worst else {
            return Ok(ProbeOutcome::Certificate);
        };
        let d = center.len();
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        let task = BanditTask::from_columns(&[vec![0.0; d], e], designer_next(center))?;
        Ok(ProbeOutcome::Forcing { coordinate: j, task })
    }
}
