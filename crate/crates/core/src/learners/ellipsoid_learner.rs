use serde::{Deserialize, Serialize};

use crate::bandit::BanditTask;
use crate::ellipsoid::{cut_or_skip, EllipsoidState};
use crate::oracles::{Demonstration, HumanOracle, Verdict};
use crate::{Error, Result};

/// Relative tolerance for treating greedy scores as tied.
pub const GREEDY_TIE_TOL: f64 = 1e-12;

/// Picks one action among the greedy maximizers.
pub trait TieBreak {
    /// `tied` is nonempty and sorted.
    fn choose(&self, task: &BanditTask, tied: &[usize]) -> usize;
}

/// Lowest index wins.
#[derive(Debug, Clone, Copy, Default)]
pub struct Lexicographic;

impl TieBreak for Lexicographic {
    fn choose(&self, _task: &BanditTask, tied: &[usize]) -> usize {
        tied[0]
    }
}

/// Ellipsoid learner: acts greedily on `center + r` and cuts on every mistake.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerState {
    pub ellipsoid: EllipsoidState,
    pub mistake_count: usize,
    pub round: usize,
    epsilon: f64,
}

/// What one mistake did to the ellipsoid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpdateOutcome {
    pub cut_vector: Vec<f64>,
    pub cut_applied: bool,
    pub clamp_cuts: usize,
    /// Log-volume decrease of each cut, the main cut first.
    pub log_volume_drops: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundOutcome {
    pub chosen: usize,
    pub verdict: Verdict,
    pub update: Option<UpdateOutcome>,
}

impl LearnerState {
    /// Starts from the ball around `[-1, 1]^d`.
    pub fn new(d: usize, epsilon: f64) -> Result<Self> {
        Self::from_ellipsoid(EllipsoidState::init_box(d)?, epsilon)
    }

    pub fn from_ellipsoid(ellipsoid: EllipsoidState, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidInput(format!("epsilon must be > 0, got {epsilon}")));
        }
        Ok(LearnerState {
            ellipsoid,
            mistake_count: 0,
            round: 0,
            epsilon,
        })
    }

    pub fn dim(&self) -> usize {
        self.ellipsoid.dim()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn center(&self) -> &[f64] {
        self.ellipsoid.center()
    }

    /// Actions whose score under `center + r` is within tolerance of the best.
    pub fn greedy_set(&self, task: &BanditTask) -> Result<Vec<usize>> {
        if task.dim() != self.dim() {
            return Err(Error::InvalidInput(format!(
                "task dimension {} differs from learner dimension {}",
                task.dim(),
                self.dim()
            )));
        }
        let scores = task.values(self.center());
        let best = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let scale = scores.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        Ok((0..scores.len())
            .filter(|&a| scores[a] >= best - GREEDY_TIE_TOL * scale)
            .collect())
    }

    pub fn choose(&self, task: &BanditTask, tie: &dyn TieBreak) -> Result<usize> {
        Ok(tie.choose(task, &self.greedy_set(task)?))
    }

    /// Cuts with `g = x^{demo} - x^{chosen}`, then pulls the center back into
    /// the box.
    pub fn update(&self, task: &BanditTask, chosen: usize, demo: usize) -> Result<(LearnerState, UpdateOutcome)> {
        if chosen >= task.num_actions() || demo >= task.num_actions() {
            return Err(Error::InvalidInput("action out of range".into()));
        }
        let g: Vec<f64> = task
            .column(demo)
            .iter()
            .zip(task.column(chosen))
            .map(|(a, b)| a - b)
            .collect();
        let mut drops = Vec::new();
        let before = self.ellipsoid.log_volume();
        let cut = cut_or_skip(&self.ellipsoid, &g)?;
        let cut_applied = cut.is_some();
        let cut = cut.unwrap_or_else(|| self.ellipsoid.clone());
        if cut_applied {
            drops.push(before - cut.log_volume());
        }
        let (ellipsoid, clamp_drops) = cut.clamp_center_logged(self.epsilon)?;
        let clamp_cuts = clamp_drops.len();
        drops.extend(clamp_drops);
        Ok((
            LearnerState {
                ellipsoid,
                mistake_count: self.mistake_count + 1,
                round: self.round,
                epsilon: self.epsilon,
            },
            UpdateOutcome {
                cut_vector: g,
                cut_applied,
                clamp_cuts,
                log_volume_drops: drops,
            },
        ))
    }

    /// One full round: choose, get judged, update on a mistake.
    pub fn play(&mut self, task: &BanditTask, human: &HumanOracle, tie: &dyn TieBreak) -> Result<RoundOutcome> {
        let chosen = self.choose(task, tie)?;
        let verdict = human.evaluate_bandit(task, chosen)?;
        self.round += 1;
        let update = match &verdict.demo {
            Some(Demonstration::Action(best)) => {
                let (next, outcome) = self.update(task, chosen, *best)?;
                *self = next;
                Some(outcome)
            }
            Some(_) => {
                return Err(Error::ProtocolViolation(
                    "bandit verdict carried a non-action demonstration".into(),
                ))
            }
            None => None,
        };
        Ok(RoundOutcome {
            chosen,
            verdict,
            update,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reward_space::{TaskReward, ThetaVector};

    fn unit_pair(d: usize, j: usize, r: Vec<f64>) -> BanditTask {
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        BanditTask::from_columns(&[vec![0.0; d], e], TaskReward(r)).unwrap()
    }

    #[test]
    fn zero_scores_choose_first_action() {
        let l = LearnerState::new(3, 0.1).unwrap();
        let task = unit_pair(3, 1, vec![0.0; 3]);
        assert_eq!(l.choose(&task, &Lexicographic).unwrap(), 0);
    }

    #[test]
    fn unit_vector_chosen_iff_positive_score() {
        let mut l = LearnerState::new(2, 0.1).unwrap();
        l.ellipsoid = EllipsoidState::new(vec![0.2, -0.4], l.ellipsoid.shape().clone()).unwrap();
        assert_eq!(l.choose(&unit_pair(2, 0, vec![-0.1, 0.0]), &Lexicographic).unwrap(), 1);
        assert_eq!(l.choose(&unit_pair(2, 0, vec![-0.3, 0.0]), &Lexicographic).unwrap(), 0);
        assert_eq!(l.choose(&unit_pair(2, 1, vec![0.0, 0.5]), &Lexicographic).unwrap(), 1);
    }

    #[test]
    fn mistakes_cut_and_keep_theta_star() {
        let theta = ThetaVector::new(vec![0.6, -0.5, 0.2]);
        let h = HumanOracle::new(theta.clone(), 0.05).unwrap();
        let mut l = LearnerState::new(3, 0.05).unwrap();
        for j in 0..3 {
            let out = l.play(&unit_pair(3, j, vec![0.0; 3]), &h, &Lexicographic).unwrap();
            if out.verdict.mistake {
                let up = out.update.unwrap();
                assert!(up.cut_applied);
                for drop in up.log_volume_drops {
                    assert!(drop >= 1.0 / 8.0 - 1e-9);
                }
            }
            assert!(l.ellipsoid.contains(theta.as_slice()).unwrap());
        }
        // theta_0 = 0.6 > eps on a zero center: first round is a mistake
        assert!(l.mistake_count >= 1);
        assert_eq!(l.round, 3);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let l = LearnerState::new(3, 0.1).unwrap();
        assert!(l.choose(&unit_pair(2, 0, vec![0.0; 2]), &Lexicographic).is_err());
    }
}
