use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bandit::{lexicographic_argmax, BanditTask};
use crate::learners::TieBreak;
use crate::mdp::{self, Environment, OccupancyVector, OptimalSolution, Policy, Trajectory};
use crate::reward_space::{TaskReward, ThetaVector};
use crate::{Error, Result};

/// What the human shows after a mistake.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Demonstration {
    Action(usize),
    Occupancy(OccupancyVector),
    Trajectory {
        trajectory: Trajectory,
        occupancy: OccupancyVector,
    },
}

/// Outcome of the human's evaluation. `demo` is present exactly when `mistake` is.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub mistake: bool,
    pub loss: f64,
    pub demo: Option<Demonstration>,
}

impl Verdict {
    fn new(loss: f64, epsilon: f64, demo: impl FnOnce() -> Result<Demonstration>) -> Result<Self> {
        let mistake = loss > epsilon;
        Ok(Verdict {
            mistake,
            loss,
            demo: if mistake { Some(demo()?) } else { None },
        })
    }
}

/// The human: knows `theta_star`, tolerates losses up to `epsilon`.
#[derive(Debug, Clone)]
pub struct HumanOracle {
    theta_star: ThetaVector,
    epsilon: f64,
}

impl HumanOracle {
    pub fn new(theta_star: ThetaVector, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidInput(format!("epsilon must be > 0, got {epsilon}")));
        }
        if theta_star.is_empty() || !(theta_star.sup_norm() <= 1.0 + 1e-12) {
            return Err(Error::InvalidInput(
                "hidden reward must be nonempty with sup-norm <= 1".into(),
            ));
        }
        Ok(HumanOracle {
            theta_star,
            epsilon,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn dim(&self) -> usize {
        self.theta_star.len()
    }

    /// The hidden reward, for scoring finished runs. Learners never see it.
    pub fn reveal_theta_star(&self) -> &ThetaVector {
        &self.theta_star
    }

    fn combined(&self, r: &TaskReward) -> Result<Vec<f64>> {
        if r.len() != self.dim() {
            return Err(Error::InvalidInput(format!(
                "task reward length {} differs from hidden reward length {}",
                r.len(),
                self.dim()
            )));
        }
        Ok(self
            .theta_star
            .values
            .iter()
            .zip(r.as_slice())
            .map(|(a, b)| a + b)
            .collect())
    }

    /// Judges action `chosen` of a bandit task; reveals the best action on a mistake.
    pub fn evaluate_bandit(&self, task: &BanditTask, chosen: usize) -> Result<Verdict> {
        if task.dim() != self.dim() {
            return Err(Error::InvalidInput("task dimension differs from hidden reward".into()));
        }
        if chosen >= task.num_actions() {
            return Err(Error::InvalidInput(format!("action {chosen} out of range")));
        }
        let values = task.values(self.theta_star.as_slice());
        let best = lexicographic_argmax(&values);
        let loss = (values[best] - values[chosen]).max(0.0);
        Verdict::new(loss, self.epsilon, || Ok(Demonstration::Action(best)))
    }

    /// Solves task `(env, r)` under `theta_star + r` once for repeated queries.
    pub fn judge<'a>(&'a self, env: &'a Environment, r: &TaskReward) -> Result<TaskJudge<'a>> {
        let y = self.combined(r)?;
        let solution = mdp::solve_optimal(env, &y)?;
        Ok(TaskJudge {
            env,
            y,
            solution,
            epsilon: self.epsilon,
        })
    }

    /// Judges a full policy; reveals the optimal occupancy on a mistake.
    pub fn evaluate_mdp(&self, env: &Environment, r: &TaskReward, pi: &Policy) -> Result<Verdict> {
        self.judge(env, r)?.evaluate(pi)
    }

    /// Optimal occupancy for a task the agent picked (no evaluation involved).
    pub fn demonstrate(&self, env: &Environment, r: &TaskReward) -> Result<OccupancyVector> {
        let judge = self.judge(env, r)?;
        mdp::occupancy(env, &judge.solution.policy)
    }

    /// Whether taking `a` in `s` loses more than `epsilon`: `Q*(s,a) < V*(s) - epsilon`.
    pub fn check_action(&self, env: &Environment, r: &TaskReward, s: usize, a: usize) -> Result<bool> {
        self.judge(env, r)?.check_action(s, a)
    }

    /// `horizon` optimal steps from `s` with their empirical occupancy.
    pub fn demo_trajectory<R: Rng + ?Sized>(
        &self,
        env: &Environment,
        r: &TaskReward,
        s: usize,
        horizon: usize,
        rng: &mut R,
    ) -> Result<(Trajectory, OccupancyVector)> {
        self.judge(env, r)?.demo_trajectory(s, horizon, rng)
    }

    /// Tie-break hook that resolves ties against the learner: among tied
    /// actions, the one with the lowest value under `theta_star + r`.
    pub fn worst_case(&self) -> WorstCase<'_> {
        WorstCase { oracle: self }
    }
}

/// A task already solved by the human.
#[derive(Debug, Clone)]
pub struct TaskJudge<'a> {
    env: &'a Environment,
    y: Vec<f64>,
    solution: OptimalSolution,
    epsilon: f64,
}

impl TaskJudge<'_> {
    pub fn evaluate(&self, pi: &Policy) -> Result<Verdict> {
        let eta_star = mdp::occupancy(self.env, &self.solution.policy)?;
        let eta = mdp::occupancy(self.env, pi)?;
        let loss = (eta_star.dot(&self.y) - eta.dot(&self.y)).max(0.0);
        Verdict::new(loss, self.epsilon, || Ok(Demonstration::Occupancy(eta_star.clone())))
    }

    pub fn check_action(&self, s: usize, a: usize) -> Result<bool> {
        if s >= self.env.num_states() || a >= self.env.num_actions() {
            return Err(Error::InvalidInput(format!("state-action ({s}, {a}) out of range")));
        }
        Ok(self.solution.q[s][a] < self.solution.values[s] - self.epsilon)
    }

    pub fn demo_trajectory<R: Rng + ?Sized>(
        &self,
        s: usize,
        horizon: usize,
        rng: &mut R,
    ) -> Result<(Trajectory, OccupancyVector)> {
        mdp::rollout(self.env, &self.solution.policy, s, horizon, rng)
    }
}

/// See [`HumanOracle::worst_case`]. Simulation-only: it reads the hidden reward.
#[derive(Debug, Clone, Copy)]
pub struct WorstCase<'a> {
    oracle: &'a HumanOracle,
}

impl TieBreak for WorstCase<'_> {
    fn choose(&self, task: &BanditTask, tied: &[usize]) -> usize {
        let values = task.values(self.oracle.theta_star.as_slice());
        let mut worst = tied[0];
        for &a in tied {
            if values[a] < values[worst] {
                worst = a;
            }
        }
        worst
    }
}
