use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{trajectory_batch_size, trajectory_horizon};
use crate::ellipsoid::cut_or_skip;
use crate::learners::LearnerState;
use crate::mdp::{self, Environment, Policy};
use crate::oracles::HumanOracle;
use crate::reward_space::TaskReward;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryConfig {
    /// Demonstration length.
    pub horizon: usize,
    /// Flags per cut.
    pub batch_size: usize,
    /// Maximum length of the agent's own episode.
    pub agent_horizon: usize,
}

impl TrajectoryConfig {
    /// Horizon and batch size from the guarantee's formulas for `d = |S|`;
    /// the agent's episode is as long as a demonstration.
    pub fn from_theory(num_states: usize, epsilon: f64, gamma: f64, delta: f64) -> Self {
        let horizon = trajectory_horizon(epsilon, gamma);
        TrajectoryConfig {
            horizon,
            batch_size: trajectory_batch_size(num_states, epsilon, delta),
            agent_horizon: horizon,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.horizon == 0 || self.batch_size == 0 || self.agent_horizon == 0 {
            return Err(Error::InvalidInput(
                "horizon, batch size and agent horizon must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Mini-batch accumulators. `filled < batch_size` between updates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchState {
    pub filled: usize,
    /// Sum of the agent's analytic occupancies from the flagged states.
    pub z_bar: Vec<f64>,
    /// Sum of the demonstrations' empirical occupancies.
    pub z_star_bar: Vec<f64>,
}

impl BatchState {
    fn new(d: usize) -> Self {
        BatchState {
            filled: 0,
            z_bar: vec![0.0; d],
            z_star_bar: vec![0.0; d],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchCut {
    /// `Z*_bar - Z_bar` (unnormalized sums).
    pub cut_vector: Vec<f64>,
    pub center_before: Vec<f64>,
    pub applied: bool,
    pub clamp_cuts: usize,
    pub log_volume_drops: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub round: usize,
    pub policy: Policy,
    pub steps: usize,
    /// State and action the human flagged, if any.
    pub flagged: Option<(usize, usize)>,
    /// l1 mass of the demonstration's empirical occupancy.
    pub demo_mass: Option<f64>,
    pub cut: Option<BatchCut>,
}

/// Ellipsoid learner driven by per-state flags and truncated demonstrations.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLearner {
    pub learner: LearnerState,
    pub batch: BatchState,
    pub config: TrajectoryConfig,
}

impl TrajectoryLearner {
    pub fn new(num_states: usize, epsilon: f64, config: TrajectoryConfig) -> Result<Self> {
        config.validate()?;
        Ok(TrajectoryLearner {
            learner: LearnerState::new(num_states, epsilon)?,
            batch: BatchState::new(num_states),
            config,
        })
    }

    pub fn mistakes(&self) -> usize {
        self.learner.mistake_count
    }

    /// One episode on task `(env, r)`.
    ///
    /// The agent plays the optimal policy for `center + r` from a state drawn
    /// from `mu`. At the first flagged action the episode ends, the human
    /// demonstrates from that state, and both occupancies join the batch. A
    /// full batch triggers a cut with `Z*_bar - Z_bar`.
    pub fn step<A: Rng + ?Sized, H: Rng + ?Sized>(
        &mut self,
        env: &Environment,
        r: &TaskReward,
        human: &HumanOracle,
        agent_rng: &mut A,
        human_rng: &mut H,
    ) -> Result<EpisodeLog> {
        let d = self.learner.dim();
        if env.num_states() != d || r.len() != d {
            return Err(Error::InvalidInput("task size differs from learner dimension".into()));
        }
        let y: Vec<f64> = self
            .learner
            .center()
            .iter()
            .zip(r.as_slice())
            .map(|(c, r)| c + r)
            .collect();
        let policy = mdp::solve_optimal(env, &y)?.policy;
        let judge = human.judge(env, r)?;
        self.learner.round += 1;
        let mut log = EpisodeLog {
            round: self.learner.round,
            policy: policy.clone(),
            steps: 0,
            flagged: None,
            demo_mass: None,
            cut: None,
        };
        let mut s = env.sample_initial(agent_rng);
        for _ in 0..self.config.agent_horizon {
            let a = policy.action(s);
            log.steps += 1;
            if judge.check_action(s, a)? {
                log.flagged = Some((s, a));
                break;
            }
            s = env.sample_next(s, a, agent_rng);
        }
        let Some((s, _)) = log.flagged else {
            return Ok(log);
        };
        self.learner.mistake_count += 1;
        let (_, z_star) = judge.demo_trajectory(s, self.config.horizon, human_rng)?;
        let z = mdp::occupancy_from_state(env, &policy, s)?;
        log.demo_mass = Some(z_star.l1());
        for (acc, v) in self.batch.z_star_bar.iter_mut().zip(z_star.as_slice()) {
            *acc += v;
        }
        for (acc, v) in self.batch.z_bar.iter_mut().zip(z.as_slice()) {
            *acc += v;
        }
        self.batch.filled += 1;
        if self.batch.filled == self.config.batch_size {
            log.cut = Some(self.cut()?);
        }
        Ok(log)
    }

    fn cut(&mut self) -> Result<BatchCut> {
        let g: Vec<f64> = self
            .batch
            .z_star_bar
            .iter()
            .zip(&self.batch.z_bar)
            .map(|(a, b)| a - b)
            .collect();
        let center_before = self.learner.center().to_vec();
        let state = &self.learner.ellipsoid;
        let before = state.log_volume();
        let mut drops = Vec::new();
        let cut = cut_or_skip(state, &g)?;
        let applied = cut.is_some();
        let cut = cut.unwrap_or_else(|| state.clone());
        if applied {
            drops.push(before - cut.log_volume());
        }
        let (ellipsoid, clamp_drops) = cut.clamp_center_logged(self.learner.epsilon())?;
        let clamp_cuts = clamp_drops.len();
        drops.extend(clamp_drops);
        self.learner.ellipsoid = ellipsoid;
        self.batch = BatchState::new(g.len());
        Ok(BatchCut {
            cut_vector: g,
            center_before,
            applied,
            clamp_cuts,
            log_volume_drops: drops,
        })
    }
}
