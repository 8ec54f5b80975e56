use serde::{Deserialize, Serialize};

use crate::bandit::{bandit_to_mdp, BanditTask};
use crate::mdp::Environment;
use crate::oracles::Verdict;
use crate::reward_space::TaskReward;
use crate::{Error, Result};

/// Adversarial task stream that keeps every learner guessing.
///
/// Each task offers two actions: the zero vector and a unit vector `e_j`, with
/// reward `-m_j` on coordinate `j` only, where `m_j` is the midpoint of what the
/// adversary still considers possible for `theta_j`. Verdicts shrink the
/// interval for `theta_j`. A phase visits every coordinate whose interval is
/// still at least `10 epsilon` wide; the stream ends when none is.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversaryState {
    epsilon: f64,
    lo: Vec<f64>,
    hi: Vec<f64>,
    phase: usize,
    cursor: usize,
    pending: Option<(usize, f64)>,
}

impl AdversaryState {
    pub fn new(d: usize, epsilon: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput("adversary dimension must be >= 1".into()));
        }
        if !(epsilon > 0.0) {
            return Err(Error::InvalidInput(format!("epsilon must be > 0, got {epsilon}")));
        }
        Ok(AdversaryState {
            epsilon,
            lo: vec![-1.0; d],
            hi: vec![1.0; d],
            phase: 0,
            cursor: 0,
            pending: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Completed phases.
    pub fn phase(&self) -> usize {
        self.phase
    }

    pub fn interval(&self, j: usize) -> (f64, f64) {
        (self.lo[j], self.hi[j])
    }

    fn live(&self, j: usize) -> bool {
        self.hi[j] - self.lo[j] >= 10.0 * self.epsilon
    }

    pub fn is_finished(&self) -> bool {
        (0..self.dim()).all(|j| !self.live(j))
    }

    /// Whether `theta` lies in every remaining interval.
    pub fn consistent_with(&self, theta: &[f64]) -> bool {
        theta
            .iter()
            .enumerate()
            .all(|(j, &t)| self.lo[j] <= t && t <= self.hi[j])
    }

    /// Next task and the coordinate it probes, or `None` once every interval is
    /// narrower than `10 epsilon`. Must be followed by [`AdversaryState::observe`].
    pub fn next_task(&mut self) -> Result<Option<(usize, BanditTask)>> {
        if self.pending.is_some() {
            return Err(Error::ProtocolViolation(
                "previous adversary task has not been observed".into(),
            ));
        }
        if self.is_finished() {
            return Ok(None);
        }
        loop {
            if self.cursor == self.dim() {
                self.cursor = 0;
                self.phase += 1;
            }
            let j = self.cursor;
            self.cursor += 1;
            if self.live(j) {
                let d = self.dim();
                let mut e = vec![0.0; d];
                e[j] = 1.0;
                let mut r = vec![0.0; d];
                let rj = -(self.lo[j] + self.hi[j]) / 2.0;
                r[j] = rj;
                let task = BanditTask::from_columns(&[vec![0.0; d], e], TaskReward(r))?;
                self.pending = Some((j, rj));
                return Ok(Some((j, task)));
            }
        }
    }

    /// Narrows the probed interval using the learner's action and the verdict.
    ///
    /// Choosing the zero vector is a mistake iff `theta_j + R_j > epsilon`;
    /// choosing `e_j` is a mistake iff `theta_j + R_j < -epsilon`.
    pub fn observe(&mut self, chosen: usize, verdict: &Verdict) -> Result<()> {
        let (j, rj) = self.pending.take().ok_or_else(|| {
            Error::ProtocolViolation("observation without a pending adversary task".into())
        })?;
        let eps = self.epsilon;
        match (chosen, verdict.mistake) {
            (0, true) => self.lo[j] = self.lo[j].max(eps - rj),
            (0, false) => self.hi[j] = self.hi[j].min(eps - rj),
            (1, true) => self.hi[j] = self.hi[j].min(-eps - rj),
            (1, false) => self.lo[j] = self.lo[j].max(-eps - rj),
            _ => {
                return Err(Error::ProtocolViolation(format!(
                    "adversary tasks have two actions, got {chosen}"
                )))
            }
        }
        if self.lo[j] > self.hi[j] {
            return Err(Error::ProtocolViolation(format!(
                "interval for coordinate {j} became empty: [{}, {}]",
                self.lo[j], self.hi[j]
            )));
        }
        Ok(())
    }
}

/// The same stream as MDP tasks, through [`bandit_to_mdp`].
pub fn adversary_to_mdp_stream(
    tasks: &[BanditTask],
    gamma: f64,
) -> Result<Vec<(Environment, TaskReward)>> {
    tasks
        .iter()
        .map(|t| bandit_to_mdp(t, gamma).map(|(env, r, _)| (env, r)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::HumanOracle;
    use crate::reward_space::ThetaVector;

    #[test]
    fn first_task_probes_midpoint_zero() {
        let mut adv = AdversaryState::new(3, 0.01).unwrap();
        let (j, task) = adv.next_task().unwrap().unwrap();
        assert_eq!(j, 0);
        assert_eq!(task.column(0), vec![0.0; 3]);
        assert_eq!(task.column(1), vec![1.0, 0.0, 0.0]);
        assert_eq!(task.reward().as_slice(), &[0.0, 0.0, 0.0]);
        assert!(adv.next_task().is_err());
    }

    #[test]
    fn intervals_stay_consistent_and_shrink() {
        let theta = ThetaVector::new(vec![0.73, -0.2]);
        let eps = 0.01;
        let human = HumanOracle::new(theta.clone(), eps).unwrap();
        let mut adv = AdversaryState::new(2, eps).unwrap();
        let mut steps = 0;
        while let Some((_, task)) = adv.next_task().unwrap() {
            // a learner that always takes the unit vector
            let v = human.evaluate_bandit(&task, 1).unwrap();
            adv.observe(1, &v).unwrap();
            assert!(adv.consistent_with(theta.as_slice()));
            steps += 1;
            assert!(steps < 1000);
        }
        for j in 0..2 {
            let (lo, hi) = adv.interval(j);
            assert!(hi - lo < 10.0 * eps);
        }
    }

    #[test]
    fn verdicts_move_the_right_endpoint() {
        let eps = 0.01;
        let mut adv = AdversaryState::new(1, eps).unwrap();
        let yes = Verdict { mistake: true, loss: 1.0, demo: None };
        let no = Verdict { mistake: false, loss: 0.0, demo: None };
        adv.next_task().unwrap();
        // zero action wrong at R = 0: theta > eps
        adv.observe(0, &yes).unwrap();
        assert_eq!(adv.interval(0), (0.01, 1.0));
        let (_, t) = adv.next_task().unwrap().unwrap();
        assert!((t.reward().as_slice()[0] + 0.505).abs() < 1e-15);
        // unit vector accepted: theta >= -eps + 0.505
        adv.observe(1, &no).unwrap();
        assert!((adv.interval(0).0 - 0.495).abs() < 1e-15);
        adv.next_task().unwrap();
        // zero action accepted: theta <= eps - R
        adv.observe(0, &no).unwrap();
        let (lo, hi) = adv.interval(0);
        assert!((hi - (0.01 + (0.495 + 1.0) / 2.0)).abs() < 1e-15);
        assert!(lo <= hi);
    }

    #[test]
    fn protocol_is_enforced() {
        let mut adv = AdversaryState::new(1, 0.01).unwrap();
        let no = Verdict { mistake: false, loss: 0.0, demo: None };
        assert!(matches!(adv.observe(0, &no), Err(Error::ProtocolViolation(_))));
        adv.next_task().unwrap();
        assert!(matches!(adv.observe(2, &no), Err(Error::ProtocolViolation(_))));
    }

    #[test]
    fn mdp_stream_has_reference_state() {
        let mut adv = AdversaryState::new(2, 0.05).unwrap();
        let (_, t) = adv.next_task().unwrap().unwrap();
        let stream = adversary_to_mdp_stream(&[t], 0.9).unwrap();
        assert_eq!(stream[0].0.num_states(), 3);
        assert_eq!(stream[0].1.as_slice()[0], 0.0);
    }
}
