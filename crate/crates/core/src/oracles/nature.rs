//! Random task streams.

use rand::Rng;

use crate::bandit::BanditTask;
use crate::mdp::{random_environment, Environment};
use crate::reward_space::TaskReward;
use crate::Result;

/// A random direction in the l1 ball, scaled by an independent `Unif[0, 1)` radius.
fn l1_ball_point<R: Rng + ?Sized>(d: usize, nonnegative: bool, rng: &mut R) -> Vec<f64> {
    let lo = if nonnegative { 0.0 } else { -1.0 };
    let v: Vec<f64> = (0..d).map(|_| rng.random_range(lo..=1.0)).collect();
    let norm: f64 = v.iter().map(|x| x.abs()).sum();
    if norm == 0.0 {
        return v;
    }
    let radius: f64 = rng.random();
    v.iter().map(|x| x / norm * radius).collect()
}

fn uniform_reward<R: Rng + ?Sized>(d: usize, rng: &mut R) -> TaskReward {
    TaskReward((0..d).map(|_| rng.random_range(-1.0..=1.0)).collect())
}

/// Bandit task with `k` random columns in the l1 unit ball and `Unif[-1, 1]` rewards.
pub fn random_bandit_task<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Result<BanditTask> {
    let cols: Vec<Vec<f64>> = (0..k).map(|_| l1_ball_point(d, false, rng)).collect();
    BanditTask::from_columns(&cols, uniform_reward(d, rng))
}

/// As [`random_bandit_task`] with nonnegative columns, the form that
/// converts to an MDP.
pub fn random_nonnegative_task<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Result<BanditTask> {
    let cols: Vec<Vec<f64>> = (0..k).map(|_| l1_ball_point(d, true, rng)).collect();
    BanditTask::from_columns(&cols, uniform_reward(d, rng))
}

/// Random environment with a `Unif[-1, 1]` task reward.
pub fn random_mdp_task<R: Rng + ?Sized>(
    num_states: usize,
    num_actions: usize,
    gamma: f64,
    rng: &mut R,
) -> Result<(Environment, TaskReward)> {
    let env = random_environment(num_states, num_actions, gamma, rng)?;
    Ok((env, uniform_reward(num_states, rng)))
}
