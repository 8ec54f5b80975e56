use serde::{Deserialize, Serialize};

use crate::mdp::Environment;
use crate::oracles::HumanOracle;
use crate::reward_space::{TaskReward, ThetaVector};
use crate::{Error, Result};

/// Occupancy below this counts as "the demonstrator left immediately".
const ZERO_OCCUPANCY: f64 = 1e-12;

/// Every non-reference state offers a self-loop (action 0) or a jump to the
/// reference state (action 1); the reference state is absorbing. The episode
/// starts uniformly among the non-reference states. The reference state is 0.
pub fn build_probe_environment(num_states: usize, gamma: f64) -> Result<(Environment, usize)> {
    if num_states < 2 {
        return Err(Error::InvalidInput("probe environment needs at least 2 states".into()));
    }
    let s_ref = 0;
    let point = |t: usize| {
        let mut p = vec![0.0; num_states];
        p[t] = 1.0;
        p
    };
    let transitions = (0..num_states)
        .map(|s| {
            if s == s_ref {
                vec![point(s), point(s)]
            } else {
                vec![point(s), point(s_ref)]
            }
        })
        .collect();
    let mut mu = vec![1.0 / (num_states - 1) as f64; num_states];
    mu[s_ref] = 0.0;
    Ok((Environment::new(gamma, mu, transitions)?, s_ref))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentificationResult {
    /// Canonical estimate, zero at the reference state.
    pub theta_hat: ThetaVector,
    pub tasks_used: usize,
    pub per_state_intervals: Vec<(f64, f64)>,
    /// Intervals after each task.
    pub history: Vec<Vec<(f64, f64)>>,
}

/// Binary search on every state at once in the probe environment.
///
/// Each task sets `R(s) = -mid_s`; the demonstrator stays at `s` iff
/// `theta(s) >= mid_s`, which shows up as nonzero occupancy. Stops when every
/// interval is at most `epsilon` wide, which takes `ceil(log2(2 / epsilon))` tasks.
/// Assumes the hidden reward is canonical at state 0 and inside `[-1, 1]`.
pub fn omniscient_identify(
    human: &HumanOracle,
    num_states: usize,
    gamma: f64,
    epsilon: f64,
) -> Result<IdentificationResult> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput(format!("epsilon must be > 0, got {epsilon}")));
    }
    let (env, s_ref) = build_probe_environment(num_states, gamma)?;
    let mut lo = vec![-1.0; num_states];
    let mut hi = vec![1.0; num_states];
    lo[s_ref] = 0.0;
    hi[s_ref] = 0.0;
    let mut history = Vec::new();
    while (0..num_states).any(|s| hi[s] - lo[s] > epsilon) {
        let mid: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| (a + b) / 2.0).collect();
        let r = TaskReward(mid.iter().map(|m| -m).collect());
        let eta = human.demonstrate(&env, &r)?;
        for s in (0..num_states).filter(|&s| s != s_ref) {
            if eta.as_slice()[s] <= ZERO_OCCUPANCY {
                hi[s] = mid[s];
            } else {
                lo[s] = mid[s];
            }
        }
        history.push(lo.iter().cloned().zip(hi.iter().cloned()).collect());
    }
    let values = lo.iter().zip(&hi).map(|(a, b)| (a + b) / 2.0).collect();
    Ok(IdentificationResult {
        theta_hat: ThetaVector {
            values,
            s_ref: Some(s_ref),
        },
        tasks_used: history.len(),
        per_state_intervals: lo.into_iter().zip(hi).collect(),
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{occupancy, Policy};
    use crate::reward_space::sample_theta;
    use crate::rng;

    #[test]
    fn probe_environment_occupancies() {
        let (env, s_ref) = build_probe_environment(4, 0.9).unwrap();
        assert_eq!(s_ref, 0);
        let stay = occupancy(&env, &Policy::constant(4, 0)).unwrap();
        for (a, b) in stay.as_slice().iter().zip(env.mu()) {
            assert!((a - b).abs() < 1e-12);
        }
        let leave = occupancy(&env, &Policy::constant(4, 1)).unwrap();
        assert_eq!(&leave.as_slice()[1..], &[0.0, 0.0, 0.0]);
        assert!((leave.as_slice()[0] - 1.0).abs() < 1e-12);
        assert!(build_probe_environment(1, 0.9).is_err());
    }

    #[test]
    fn identifies_zero_reward() {
        let eps = 1e-3;
        let h = HumanOracle::new(ThetaVector::new(vec![0.0; 5]), eps).unwrap();
        let res = omniscient_identify(&h, 5, 0.9, eps).unwrap();
        assert!(res.theta_hat.sup_norm() <= eps);
        assert_eq!(res.tasks_used, 11);
    }

    #[test]
    fn identifies_random_rewards_with_eleven_tasks() {
        let eps = 2f64.powi(-10);
        let mut rng = rng::seeded(17);
        for _ in 0..10 {
            let theta = sample_theta(6, Some(0), &mut rng).unwrap();
            let h = HumanOracle::new(theta.clone(), eps).unwrap();
            let res = omniscient_identify(&h, 6, 0.8, eps).unwrap();
            assert_eq!(res.tasks_used, 11);
            for (s, (lo, hi)) in res.per_state_intervals.iter().enumerate() {
                assert!(lo <= &theta.values[s] && &theta.values[s] <= hi);
                assert!(hi - lo <= eps);
            }
            for (a, b) in res.theta_hat.values.iter().zip(&theta.values) {
                assert!((a - b).abs() <= eps);
            }
        }
    }
}
