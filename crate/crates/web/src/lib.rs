//! Browser bindings: three small simulations that return JSON for the page in
//! `www/` to draw. The plain functions are usable (and tested) natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use rirl_core::bandit::{bandit_to_mdp, emulating_policies, mdp_to_bandit_for_policies, spread, BanditTask};
use rirl_core::bounds;
use rirl_core::ellipsoid::EllipsoidState;
use rirl_core::learners::{omniscient_identify, LearnerState, Lexicographic};
use rirl_core::mdp::occupancy;
use rirl_core::oracles::nature::random_bandit_task;
use rirl_core::oracles::{AdversaryState, HumanOracle};
use rirl_core::reward_space::{TaskReward, ThetaVector};
use rirl_core::rng::{self, Stream};

pub type Result<T> = std::result::Result<T, rirl_core::Error>;

/// A 2-D ellipse as center, semi-axes and rotation (radians).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ellipse {
    pub center: [f64; 2],
    pub axes: [f64; 2],
    pub angle: f64,
}

impl Ellipse {
    fn of(state: &EllipsoidState) -> Self {
        let q = state.shape();
        let (a, b, c) = (q[(0, 0)], q[(0, 1)], q[(1, 1)]);
        let mid = (a + c) / 2.0;
        let rad = (((a - c) / 2.0).powi(2) + b * b).sqrt();
        Ellipse {
            center: [state.center()[0], state.center()[1]],
            axes: [(mid + rad).max(0.0).sqrt(), (mid - rad).max(0.0).sqrt()],
            angle: 0.5 * (2.0 * b).atan2(a - c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Frame {
    pub round: usize,
    pub ellipse: Ellipse,
    pub mistake: bool,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LearnerRun {
    pub theta: [f64; 2],
    pub mistakes: usize,
    pub mistake_bound: f64,
    pub frames: Vec<Frame>,
}

/// Runs the ellipsoid learner in two dimensions against random tasks
/// (`adversarial = false`) or the adversary.
pub fn learner_run(theta: [f64; 2], epsilon: f64, rounds: usize, seed: u64, adversarial: bool) -> Result<LearnerRun> {
    let human = HumanOracle::new(ThetaVector::new(theta.to_vec()), epsilon)?;
    let mut learner = LearnerState::new(2, epsilon)?;
    let mut adversary = AdversaryState::new(2, epsilon)?;
    let mut tasks = rng::stream(seed, Stream::Tasks);
    let mut frames = vec![Frame {
        round: 0,
        ellipse: Ellipse::of(&learner.ellipsoid),
        mistake: false,
        loss: 0.0,
    }];
    for round in 1..=rounds {
        let task = if adversarial {
            match adversary.next_task()? {
                Some((_, t)) => t,
                None => break,
            }
        } else {
            random_bandit_task(2, 4, &mut tasks)?
        };
        let out = learner.play(&task, &human, &Lexicographic)?;
        if adversarial {
            adversary.observe(out.chosen, &out.verdict)?;
        }
        frames.push(Frame {
            round,
            ellipse: Ellipse::of(&learner.ellipsoid),
            mistake: out.verdict.mistake,
            loss: out.verdict.loss,
        });
    }
    Ok(LearnerRun {
        theta,
        mistakes: learner.mistake_count,
        mistake_bound: bounds::ellipsoid_mistake_bound(2, epsilon),
        frames,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentifyRun {
    pub theta: Vec<f64>,
    pub theta_hat: Vec<f64>,
    pub tasks_used: usize,
    /// Intervals per state after each task, the start interval first.
    pub history: Vec<Vec<(f64, f64)>>,
}

/// Binary-search identification; `theta` lists the non-reference states.
pub fn identify_run(theta: &[f64], epsilon: f64, gamma: f64) -> Result<IdentifyRun> {
    let mut full = vec![0.0];
    full.extend_from_slice(theta);
    let human = HumanOracle::new(ThetaVector::new(full.clone()), epsilon)?;
    let res = omniscient_identify(&human, full.len(), gamma, epsilon)?;
    let mut start = vec![(-1.0, 1.0); full.len()];
    start[0] = (0.0, 0.0);
    let mut history = vec![start];
    history.extend(res.history);
    Ok(IdentifyRun {
        theta: full,
        theta_hat: res.theta_hat.values,
        tasks_used: res.tasks_used,
        history,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConversionView {
    pub spread: f64,
    /// Transition row out of the reference state for each action.
    pub reference_rows: Vec<Vec<f64>>,
    /// Occupancy of the policy emulating each action.
    pub occupancies: Vec<Vec<f64>>,
    pub round_trip_error: f64,
}

/// Turns a bandit task (nonnegative columns) into an MDP and back.
pub fn convert_view(columns: &[Vec<f64>], reward: &[f64], gamma: f64) -> Result<ConversionView> {
    let task = BanditTask::from_columns(columns, TaskReward(reward.to_vec()))?;
    let (env, r, s_ref) = bandit_to_mdp(&task, gamma)?;
    let policies = emulating_policies(&env, s_ref);
    let back = mdp_to_bandit_for_policies(&env, &r, s_ref, &policies)?;
    let occupancies = policies
        .iter()
        .map(|pi| occupancy(&env, pi).map(|o| o.into_vec()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConversionView {
        spread: spread(task.features()),
        reference_rows: (0..env.num_actions())
            .map(|a| env.next_distribution(s_ref, a).to_vec())
            .collect(),
        occupancies,
        round_trip_error: (back.features() - task.features()).amax(),
    })
}

fn to_js<T: Serialize>(value: Result<T>) -> std::result::Result<String, JsError> {
    let value = value.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = learnerRun)]
pub fn learner_run_js(
    theta_x: f64,
    theta_y: f64,
    epsilon: f64,
    rounds: usize,
    seed: u32,
    adversarial: bool,
) -> std::result::Result<String, JsError> {
    to_js(learner_run([theta_x, theta_y], epsilon, rounds, seed as u64, adversarial))
}

#[wasm_bindgen(js_name = identifyRun)]
pub fn identify_run_js(theta: &[f64], epsilon: f64, gamma: f64) -> std::result::Result<String, JsError> {
    to_js(identify_run(theta, epsilon, gamma))
}

/// `columns_json` is a JSON array of feature columns.
#[wasm_bindgen(js_name = convertView)]
pub fn convert_view_js(columns_json: &str, reward: &[f64], gamma: f64) -> std::result::Result<String, JsError> {
    let columns: Vec<Vec<f64>> = serde_json::from_str(columns_json).map_err(|e| JsError::new(&e.to_string()))?;
    to_js(convert_view(&columns, reward, gamma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rirl_core::nalgebra::DMatrix;

    #[test]
    fn ellipse_axes_and_rotation() {
        let q = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let e = Ellipse::of(&EllipsoidState::new(vec![0.5, -0.5], q).unwrap());
        assert!((e.axes[0] - 3f64.sqrt()).abs() < 1e-12);
        assert!((e.axes[1] - 1.0).abs() < 1e-12);
        assert!((e.angle - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        assert_eq!(e.center, [0.5, -0.5]);
    }
}
