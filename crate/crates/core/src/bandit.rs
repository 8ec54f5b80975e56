//! Linear-bandit tasks and the reductions between MDPs and bandits.
//!
//! A bandit task is a `d x K` feature matrix (one column per action) plus a task
//! reward. An MDP task becomes a bandit task by taking one column per
//! deterministic policy: its occupancy vector.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::mdp::{self, Environment, Policy};
use crate::reward_space::{TaskReward, ThetaVector};
use crate::{Error, Result};

/// Column l1 norms may exceed 1 by at most this much.
pub const COLUMN_NORM_TOL: f64 = 1e-9;
/// Largest policy space [`mdp_to_bandit`] will enumerate.
pub const MAX_POLICIES: usize = 1_000_000;
/// Singular values below this fraction of the largest count as zero.
pub const SPREAD_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BanditTaskDoc", into = "BanditTaskDoc")]
pub struct BanditTask {
    features: DMatrix<f64>,
    r: TaskReward,
}

/// Serialized form: `features` is a list of columns.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct BanditTaskDoc {
    features: Vec<Vec<f64>>,
    r: Vec<f64>,
}

impl TryFrom<BanditTaskDoc> for BanditTask {
    type Error = Error;

    fn try_from(doc: BanditTaskDoc) -> Result<Self> {
        BanditTask::from_columns(&doc.features, TaskReward(doc.r))
    }
}

impl From<BanditTask> for BanditTaskDoc {
    fn from(task: BanditTask) -> Self {
        BanditTaskDoc {
            features: task.columns(),
            r: task.r.0,
        }
    }
}

impl BanditTask {
    pub fn new(features: DMatrix<f64>, r: TaskReward) -> Result<Self> {
        if features.ncols() < 2 {
            return Err(Error::InvalidInput(format!(
                "bandit task needs at least 2 actions, got {}",
                features.ncols()
            )));
        }
        if r.len() != features.nrows() {
            return Err(Error::InvalidInput(format!(
                "task reward length {} differs from feature dimension {}",
                r.len(),
                features.nrows()
            )));
        }
        if features.iter().chain(r.0.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite feature or reward".into()));
        }
        for (k, col) in features.column_iter().enumerate() {
            let norm = col.lp_norm(1);
            if norm > 1.0 + COLUMN_NORM_TOL {
                return Err(Error::InvalidInput(format!(
                    "column {k} has l1 norm {norm} > 1"
                )));
            }
        }
        Ok(BanditTask { features, r })
    }

    pub fn from_columns(columns: &[Vec<f64>], r: TaskReward) -> Result<Self> {
        let d = r.len();
        if let Some(bad) = columns.iter().find(|c| c.len() != d) {
            return Err(Error::InvalidInput(format!(
                "column of length {} in a {d}-dimensional task",
                bad.len()
            )));
        }
        let features = DMatrix::from_fn(d, columns.len(), |i, k| columns[k][i]);
        BanditTask::new(features, r)
    }

    pub fn dim(&self) -> usize {
        self.features.nrows()
    }

    pub fn num_actions(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn reward(&self) -> &TaskReward {
        &self.r
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.features.column(k).iter().cloned().collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.num_actions()).map(|k| self.column(k)).collect()
    }

    /// `w^T x^(k)` for every action.
    pub fn scores(&self, w: &[f64]) -> Vec<f64> {
        let w = DVector::from_column_slice(w);
        (self.features.transpose() * w).iter().cloned().collect()
    }

    /// Values under `theta + r`.
    pub fn values(&self, theta: &[f64]) -> Vec<f64> {
        let w: Vec<f64> = theta.iter().zip(&self.r.0).map(|(a, b)| a + b).collect();
        self.scores(&w)
    }
}

/// First index of the maximum.
pub fn lexicographic_argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// `(theta + r)^T (x^{a*} - x^a)` with `a*` the lexicographic best action.
pub fn bandit_loss(task: &BanditTask, theta: &ThetaVector, action: usize) -> Result<f64> {
    if theta.len() != task.dim() {
        return Err(Error::InvalidInput("theta dimension mismatch".into()));
    }
    if action >= task.num_actions() {
        return Err(Error::InvalidInput(format!("action {action} out of range")));
    }
    let values = task.values(theta.as_slice());
    let best = lexicographic_argmax(&values);
    Ok((values[best] - values[action]).max(0.0))
}

/// An MDP whose reward is linear in bounded state features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMdp {
    pub env: Environment,
    /// `phi[s]`, each of length `d`.
    pub phi: Vec<Vec<f64>>,
}

impl FeatureMdp {
    pub fn new(env: Environment, phi: Vec<Vec<f64>>) -> Result<Self> {
        if phi.len() != env.num_states() {
            return Err(Error::InvalidInput("one feature vector per state required".into()));
        }
        let d = phi.first().map_or(0, |p| p.len());
        if d == 0 || phi.iter().any(|p| p.len() != d) {
            return Err(Error::InvalidInput("feature vectors must share a positive length".into()));
        }
        if phi.iter().flatten().any(|v| !(v.abs() <= 1.0)) {
            return Err(Error::InvalidInput("features must satisfy |phi| <= 1".into()));
        }
        Ok(FeatureMdp { env, phi })
    }

    pub fn dim(&self) -> usize {
        self.phi[0].len()
    }
}

fn check_enumerable(env: &Environment) -> Result<()> {
    let count = env.policy_count();
    if count > MAX_POLICIES as f64 {
        return Err(Error::PolicySpaceTooLarge {
            count,
            limit: MAX_POLICIES,
        });
    }
    Ok(())
}

/// Canonical conversion restricted to the given policies (one column each).
pub fn mdp_to_bandit_for_policies(
    env: &Environment,
    r: &TaskReward,
    s_ref: usize,
    policies: &[Policy],
) -> Result<BanditTask> {
    let n = env.num_states();
    if r.len() != n || s_ref >= n {
        return Err(Error::InvalidInput("task reward or reference state out of range".into()));
    }
    let columns = policies
        .iter()
        .map(|pi| {
            let mut eta = mdp::occupancy(env, pi)?.into_vec();
            eta.remove(s_ref);
            Ok(eta)
        })
        .collect::<Result<Vec<_>>>()?;
    let shift = r.0[s_ref];
    let mut reduced: Vec<f64> = r.0.iter().map(|v| v - shift).collect();
    reduced.remove(s_ref);
    BanditTask::from_columns(&columns, TaskReward(reduced))
}

/// Canonical conversion: one action per deterministic policy, occupancy with
/// the reference coordinate dropped, and the task reward shifted to be zero at
/// the reference state. Columns follow [`mdp::enumerate_policies`] order.
pub fn mdp_to_bandit(env: &Environment, r: &TaskReward, s_ref: usize) -> Result<BanditTask> {
    check_enumerable(env)?;
    let policies: Vec<Policy> = mdp::enumerate_policies(env.num_states(), env.num_actions()).collect();
    mdp_to_bandit_for_policies(env, r, s_ref, &policies)
}

/// `|S|`-dimensional conversion: columns are full occupancies and `r` is unchanged.
pub fn mdp_to_bandit_full(env: &Environment, r: &TaskReward) -> Result<BanditTask> {
    check_enumerable(env)?;
    if r.len() != env.num_states() {
        return Err(Error::InvalidInput("task reward length mismatch".into()));
    }
    let columns = mdp::enumerate_policies(env.num_states(), env.num_actions())
        .map(|pi| Ok(mdp::occupancy(env, &pi)?.into_vec()))
        .collect::<Result<Vec<_>>>()?;
    BanditTask::from_columns(&columns, r.clone())
}

/// Columns are `sum_s eta^pi(s) phi(s) / d`, the discounted expected feature sum
/// normalized by the feature dimension.
pub fn feature_mdp_to_bandit(fmdp: &FeatureMdp, r: &TaskReward) -> Result<BanditTask> {
    check_enumerable(&fmdp.env)?;
    let d = fmdp.dim();
    if r.len() != d {
        return Err(Error::InvalidInput("task reward length must equal feature dimension".into()));
    }
    let columns = mdp::enumerate_policies(fmdp.env.num_states(), fmdp.env.num_actions())
        .map(|pi| {
            let eta = mdp::occupancy(&fmdp.env, &pi)?;
            let mut x = vec![0.0; d];
            for (w, phi) in eta.as_slice().iter().zip(&fmdp.phi) {
                for (xi, p) in x.iter_mut().zip(phi) {
                    *xi += w * p / d as f64;
                }
            }
            Ok(x)
        })
        .collect::<Result<Vec<_>>>()?;
    BanditTask::from_columns(&columns, r.clone())
}

/// Emulates a bandit task with nonnegative columns by an MDP.
///
/// State 0 is the reference state and the initial state; states `1..=d` are
/// absorbing. Action `k` at the reference state self-loops with probability
/// `(1 - |x|_1) / (1 - gamma |x|_1)` and moves to state `j + 1` with
/// probability `(1 - gamma) x_j / (1 - gamma |x|_1)`, which makes its
/// occupancy `(1 - |x|_1, x)`.
pub fn bandit_to_mdp(task: &BanditTask, gamma: f64) -> Result<(Environment, TaskReward, usize)> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::InvalidInput(format!("discount {gamma} outside [0, 1)")));
    }
    let d = task.dim();
    let n = d + 1;
    let s_ref = 0;
    let mut ref_row = Vec::with_capacity(task.num_actions());
    for (k, col) in task.columns().into_iter().enumerate() {
        if col.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidInput(format!("column {k} has a negative feature")));
        }
        let norm: f64 = col.iter().sum();
        if norm > 1.0 {
            return Err(Error::InvalidInput(format!("column {k} has l1 norm {norm} > 1")));
        }
        let denom = 1.0 - gamma * norm;
        let mut p = Vec::with_capacity(n);
        p.push((1.0 - norm) / denom);
        p.extend(col.iter().map(|x| (1.0 - gamma) * x / denom));
        ref_row.push(p);
    }
    let absorbing = |s: usize| {
        let mut p = vec![0.0; n];
        p[s] = 1.0;
        vec![p; task.num_actions()]
    };
    let mut transitions = vec![ref_row];
    transitions.extend((1..n).map(absorbing));
    let mut mu = vec![0.0; n];
    mu[s_ref] = 1.0;
    let env = Environment::new(gamma, mu, transitions)?;
    let mut r = vec![0.0];
    r.extend_from_slice(task.reward().as_slice());
    Ok((env, TaskReward(r), s_ref))
}

/// Policies of a [`bandit_to_mdp`] environment that realize each bandit action:
/// action `k` at the reference state, action 0 elsewhere.
pub fn emulating_policies(env: &Environment, s_ref: usize) -> Vec<Policy> {
    (0..env.num_actions())
        .map(|k| {
            let mut actions = vec![0; env.num_states()];
            actions[s_ref] = k;
            Policy::new(actions)
        })
        .collect()
}

/// Column-centred feature matrix `X (I - 11^T / K)`.
pub fn centered(x: &DMatrix<f64>) -> DMatrix<f64> {
    let mean = x.column_mean();
    let mut c = x.clone();
    for mut col in c.column_iter_mut() {
        col -= &mean;
    }
    c
}

/// The `d`-th largest singular value of the column-centred feature matrix;
/// zero when that matrix is rank deficient.
pub fn spread(x: &DMatrix<f64>) -> f64 {
    let d = x.nrows();
    if d == 0 || x.ncols() < d {
        return 0.0;
    }
    let mut sv: Vec<f64> = centered(x).singular_values().iter().cloned().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let top = sv.first().copied().unwrap_or(0.0);
    let s = sv.get(d - 1).copied().unwrap_or(0.0);
    if top <= 0.0 || s < SPREAD_RANK_TOL * top {
        0.0
    } else {
        s
    }
}
