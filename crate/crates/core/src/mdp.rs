//! Exact finite-MDP machinery.
//!
//! Rewards are received *after* a transition: the value of a policy from `s0`
//! is `(1 - gamma) * E[sum_{t>=1} gamma^(t-1) Y(s_t)]`, so occupancies count
//! `s_1` onward and never the starting state itself.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance on probability-vector sums.
pub const PROB_TOL: f64 = 1e-12;
/// Value-iteration stopping threshold on the sup-norm change.
pub const VI_TOL: f64 = 1e-10;
pub const VI_MAX_ITERS: usize = 100_000;
/// Largest accepted residual of a linear solve.
pub const SOLVE_RESIDUAL_TOL: f64 = 1e-8;
/// Q-values within this (scaled) distance of the maximum count as ties.
const TIE_TOL: f64 = 1e-12;

/// A controlled Markov process `(S, A, mu, P, gamma)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EnvironmentDoc", into = "EnvironmentDoc")]
pub struct Environment {
    num_states: usize,
    num_actions: usize,
    gamma: f64,
    mu: Vec<f64>,
    /// `transitions[s][a][s']`
    transitions: Vec<Vec<Vec<f64>>>,
}

/// On-disk layout of an [`Environment`].
#[derive(Debug, Clone, Serialize, Deserialize)]
struct EnvironmentDoc {
    num_states: usize,
    num_actions: usize,
    gamma: f64,
    mu: Vec<f64>,
    transitions: Vec<Vec<Vec<f64>>>,
}

impl TryFrom<EnvironmentDoc> for Environment {
    type Error = Error;

    fn try_from(doc: EnvironmentDoc) -> Result<Self> {
        let env = Environment::new(doc.gamma, doc.mu, doc.transitions)?;
        if env.num_states != doc.num_states || env.num_actions != doc.num_actions {
            return Err(Error::InvalidEnvironment(format!(
                "declared {}x{} but transitions are {}x{}",
                doc.num_states, doc.num_actions, env.num_states, env.num_actions
            )));
        }
        Ok(env)
    }
}

impl From<Environment> for EnvironmentDoc {
    fn from(env: Environment) -> Self {
        EnvironmentDoc {
            num_states: env.num_states,
            num_actions: env.num_actions,
            gamma: env.gamma,
            mu: env.mu,
            transitions: env.transitions,
        }
    }
}

fn check_distribution(what: &str, p: &[f64], n: usize) -> Result<()> {
    if p.len() != n {
        return Err(Error::InvalidEnvironment(format!(
            "{what} has length {}, expected {n}",
            p.len()
        )));
    }
    if p.iter().any(|&x| !x.is_finite() || x < 0.0) {
        return Err(Error::InvalidEnvironment(format!(
            "{what} has a negative or non-finite entry"
        )));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidEnvironment(format!(
            "{what} sums to {sum}, not 1"
        )));
    }
    Ok(())
}

impl Environment {
    pub fn new(gamma: f64, mu: Vec<f64>, transitions: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let num_states = transitions.len();
        if num_states == 0 {
            return Err(Error::InvalidEnvironment("no states".into()));
        }
        let num_actions = transitions[0].len();
        if num_actions < 2 {
            return Err(Error::InvalidEnvironment(format!(
                "need at least 2 actions, got {num_actions}"
            )));
        }
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::InvalidEnvironment(format!(
                "discount {gamma} outside [0, 1)"
            )));
        }
        check_distribution("mu", &mu, num_states)?;
        for (s, row) in transitions.iter().enumerate() {
            if row.len() != num_actions {
                return Err(Error::InvalidEnvironment(format!(
                    "state {s} has {} actions, expected {num_actions}",
                    row.len()
                )));
            }
            for (a, p) in row.iter().enumerate() {
                check_distribution(&format!("P[{s}][{a}]"), p, num_states)?;
            }
        }
        Ok(Environment {
            num_states,
            num_actions,
            gamma,
            mu,
            transitions,
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// Next-state distribution of `(s, a)`.
    pub fn next_distribution(&self, s: usize, a: usize) -> &[f64] {
        &self.transitions[s][a]
    }

    /// Same dynamics with a different initial distribution.
    pub fn with_mu(&self, mu: Vec<f64>) -> Result<Self> {
        check_distribution("mu", &mu, self.num_states)?;
        Ok(Environment {
            mu,
            ..self.clone()
        })
    }

    /// `|A|^|S|` as a float (it overflows integers quickly).
    pub fn policy_count(&self) -> f64 {
        (self.num_actions as f64).powi(self.num_states as i32)
    }

    pub fn sample_initial<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        sample_index(&self.mu, rng)
    }

    pub fn sample_next<R: Rng + ?Sized>(&self, s: usize, a: usize, rng: &mut R) -> usize {
        sample_index(&self.transitions[s][a], rng)
    }

    fn check_reward(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.num_states {
            return Err(Error::InvalidInput(format!(
                "reward has length {}, expected {}",
                y.len(),
                self.num_states
            )));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("reward has a non-finite entry".into()));
        }
        Ok(())
    }

    fn check_state(&self, s: usize) -> Result<()> {
        if s >= self.num_states {
            return Err(Error::InvalidInput(format!(
                "state {s} out of range ({} states)",
                self.num_states
            )));
        }
        Ok(())
    }
}

fn sample_index<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in p.iter().enumerate() {
        if w > 0.0 {
            last_positive = i;
        }
        acc += w;
        if u < acc {
            return i;
        }
    }
    // rounding left u beyond the accumulated mass
    last_positive
}

/// Deterministic stationary policy.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Policy(Vec<usize>);

impl Policy {
    pub fn new(actions: Vec<usize>) -> Self {
        Policy(actions)
    }

    pub fn constant(num_states: usize, action: usize) -> Self {
        Policy(vec![action; num_states])
    }

    pub fn action(&self, s: usize) -> usize {
        self.0[s]
    }

    pub fn actions(&self) -> &[usize] {
        &self.0
    }

    pub fn validate(&self, env: &Environment) -> Result<()> {
        if self.0.len() != env.num_states {
            return Err(Error::InvalidInput(format!(
                "policy covers {} states, environment has {}",
                self.0.len(),
                env.num_states
            )));
        }
        if let Some(&a) = self.0.iter().find(|&&a| a >= env.num_actions) {
            return Err(Error::InvalidInput(format!(
                "policy action {a} out of range ({} actions)",
                env.num_actions
            )));
        }
        Ok(())
    }
}

/// Normalized discounted state-visitation vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OccupancyVector(Vec<f64>);

impl OccupancyVector {
    pub fn new(eta: Vec<f64>) -> Self {
        OccupancyVector(eta)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn l1(&self) -> f64 {
        self.0.iter().map(|x| x.abs()).sum()
    }

    pub fn dot(&self, y: &[f64]) -> f64 {
        dot(&self.0, y)
    }
}

/// A sampled episode: the states visited after each of the `horizon` transitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub start_state: usize,
    pub states: Vec<usize>,
    pub horizon: usize,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `P^pi` as an `|S| x |S|` matrix.
pub fn policy_transition_matrix(env: &Environment, pi: &Policy) -> DMatrix<f64> {
    let n = env.num_states;
    DMatrix::from_fn(n, n, |s, t| env.transitions[s][pi.action(s)][t])
}

fn solve_checked(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let x = a
        .clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::Numerical("singular occupancy system".into()))?;
    let residual = (a * &x - b).amax();
    if !residual.is_finite() || residual > SOLVE_RESIDUAL_TOL {
        return Err(Error::Numerical(format!(
            "linear solve residual {residual:e} exceeds {SOLVE_RESIDUAL_TOL:e}"
        )));
    }
    Ok(x)
}

/// Occupancy of `pi` from the environment's own initial distribution.
pub fn occupancy(env: &Environment, pi: &Policy) -> Result<OccupancyVector> {
    occupancy_from(env, pi, &env.mu)
}

/// Occupancy of `pi` from an arbitrary start distribution.
///
/// Solves `(I - gamma (P^pi)^T) y = (P^pi)^T start` and scales by `1 - gamma`.
pub fn occupancy_from(env: &Environment, pi: &Policy, start: &[f64]) -> Result<OccupancyVector> {
    pi.validate(env)?;
    if start.len() != env.num_states {
        return Err(Error::InvalidInput("start distribution length mismatch".into()));
    }
    let n = env.num_states;
    let pt = policy_transition_matrix(env, pi).transpose();
    let a = DMatrix::identity(n, n) - &pt * env.gamma;
    let b = &pt * DVector::from_column_slice(start);
    let y = solve_checked(&a, &b)?;
    Ok(OccupancyVector(
        y.iter().map(|v| v * (1.0 - env.gamma)).collect(),
    ))
}

/// Occupancy of `pi` started from a point mass on `s`.
pub fn occupancy_from_state(env: &Environment, pi: &Policy, s: usize) -> Result<OccupancyVector> {
    env.check_state(s)?;
    let mut start = vec![0.0; env.num_states];
    start[s] = 1.0;
    occupancy_from(env, pi, &start)
}

/// `H`-step truncated occupancy `(1-gamma) sum_{h=1..H} gamma^(h-1) Pr(s_h = .)`.
/// Its mass is `1 - gamma^H`.
pub fn truncated_occupancy(
    env: &Environment,
    pi: &Policy,
    start: &[f64],
    horizon: usize,
) -> Result<OccupancyVector> {
    pi.validate(env)?;
    let n = env.num_states;
    let mut dist = start.to_vec();
    let mut z = vec![0.0; n];
    let mut weight = 1.0 - env.gamma;
    for _ in 0..horizon {
        let mut next = vec![0.0; n];
        for (s, &ps) in dist.iter().enumerate() {
            if ps == 0.0 {
                continue;
            }
            for (t, &p) in env.transitions[s][pi.action(s)].iter().enumerate() {
                next[t] += ps * p;
            }
        }
        for (zt, &pt) in z.iter_mut().zip(&next) {
            *zt += weight * pt;
        }
        weight *= env.gamma;
        dist = next;
    }
    Ok(OccupancyVector(z))
}

/// Optimal policy with its state values and action values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalSolution {
    pub policy: Policy,
    pub values: Vec<f64>,
    /// `q[s][a]`
    pub q: Vec<Vec<f64>>,
}

impl OptimalSolution {
    /// `V*(s) - Q*(s, a)`, always `>= 0` up to rounding.
    pub fn gap(&self, s: usize, a: usize) -> f64 {
        self.values[s] - self.q[s][a]
    }
}

fn backup(env: &Environment, y: &[f64], v: &[f64]) -> Vec<Vec<f64>> {
    let g = env.gamma;
    let target: Vec<f64> = y
        .iter()
        .zip(v)
        .map(|(r, vn)| (1.0 - g) * r + g * vn)
        .collect();
    env.transitions
        .iter()
        .map(|row| row.iter().map(|p| dot(p, &target)).collect())
        .collect()
}

fn greedy(q: &[Vec<f64>], scale: f64) -> Policy {
    let tol = TIE_TOL * scale.max(1.0);
    Policy(
        q.iter()
            .map(|row| {
                let best = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                row.iter().position(|&v| v >= best - tol).unwrap_or(0)
            })
            .collect(),
    )
}

/// Exact state values of `pi` under reward `y`, per starting state.
pub fn state_values(env: &Environment, y: &[f64], pi: &Policy) -> Result<Vec<f64>> {
    env.check_reward(y)?;
    pi.validate(env)?;
    let n = env.num_states;
    let p = policy_transition_matrix(env, pi);
    let a = DMatrix::identity(n, n) - &p * env.gamma;
    let b = &p * DVector::from_column_slice(y) * (1.0 - env.gamma);
    Ok(solve_checked(&a, &b)?.iter().cloned().collect())
}

/// Optimal planning for reward `y`.
///
/// Runs value iteration on `Q(s,a) = sum_s' P(s'|s,a) ((1-gamma) Y(s') + gamma max_a' Q(s',a'))`
/// until the sup-norm change drops below [`VI_TOL`], then polishes the greedy
/// policy with exact policy evaluation so that reported values are those of the
/// returned policy. Ties go to the lowest action index.
pub fn solve_optimal(env: &Environment, y: &[f64]) -> Result<OptimalSolution> {
    env.check_reward(y)?;
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut v = vec![0.0; env.num_states];
    let mut converged = false;
    for _ in 0..VI_MAX_ITERS {
        let q = backup(env, y, &v);
        let next: Vec<f64> = q
            .iter()
            .map(|row| row.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
            .collect();
        let change = next
            .iter()
            .zip(&v)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        v = next;
        if change < VI_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "value iteration did not converge in {VI_MAX_ITERS} iterations"
        )));
    }

    let mut policy = greedy(&backup(env, y, &v), scale);
    for _ in 0..64 {
        let values = state_values(env, y, &policy)?;
        let q = backup(env, y, &values);
        let improved = greedy(&q, scale);
        if improved == policy {
            return Ok(OptimalSolution { policy, values, q });
        }
        policy = improved;
    }
    Err(Error::Numerical("policy polishing did not stabilize".into()))
}

/// `Y^T eta^pi`: expected normalized value under the initial distribution.
pub fn policy_value(env: &Environment, y: &[f64], pi: &Policy) -> Result<f64> {
    env.check_reward(y)?;
    Ok(occupancy(env, pi)?.dot(y))
}

fn combined_reward(r: &[f64], theta: &[f64]) -> Result<Vec<f64>> {
    if r.len() != theta.len() {
        return Err(Error::InvalidInput(format!(
            "task reward length {} differs from theta length {}",
            r.len(),
            theta.len()
        )));
    }
    Ok(r.iter().zip(theta).map(|(a, b)| a + b).collect())
}

/// `(theta + R)^T (eta^{pi*} - eta^pi)` with `pi*` optimal for `theta + R`.
pub fn loss(env: &Environment, r: &[f64], theta: &[f64], pi: &Policy) -> Result<f64> {
    let y = combined_reward(r, theta)?;
    let star = solve_optimal(env, &y)?;
    let eta_star = occupancy(env, &star.policy)?;
    let eta = occupancy(env, pi)?;
    Ok(eta_star
        .as_slice()
        .iter()
        .zip(eta.as_slice())
        .zip(&y)
        .map(|((a, b), w)| w * (a - b))
        .sum())
}

/// Same loss written as a difference of two policy values.
pub fn loss_by_values(env: &Environment, r: &[f64], theta: &[f64], pi: &Policy) -> Result<f64> {
    let y = combined_reward(r, theta)?;
    let star = solve_optimal(env, &y)?;
    Ok(policy_value(env, &y, &star.policy)? - policy_value(env, &y, pi)?)
}

/// Samples `horizon` transitions of `pi` from `start` and returns the path with
/// its empirical truncated occupancy `(1-gamma) sum_h gamma^(h-1) e_{s_h}`.
pub fn rollout<R: Rng + ?Sized>(
    env: &Environment,
    pi: &Policy,
    start: usize,
    horizon: usize,
    rng: &mut R,
) -> Result<(Trajectory, OccupancyVector)> {
    pi.validate(env)?;
    env.check_state(start)?;
    if horizon == 0 {
        return Err(Error::InvalidInput("rollout horizon must be >= 1".into()));
    }
    let mut z = vec![0.0; env.num_states];
    let mut states = Vec::with_capacity(horizon);
    let mut s = start;
    let mut weight = 1.0 - env.gamma;
    for _ in 0..horizon {
        s = env.sample_next(s, pi.action(s), rng);
        states.push(s);
        z[s] += weight;
        weight *= env.gamma;
    }
    Ok((
        Trajectory {
            start_state: start,
            states,
            horizon,
        },
        OccupancyVector(z),
    ))
}

/// All `|A|^|S|` deterministic policies in lexicographic order of the action
/// tuple `(pi(0), ..., pi(|S|-1))`: the last state varies fastest.
pub fn enumerate_policies(num_states: usize, num_actions: usize) -> impl Iterator<Item = Policy> {
    let total = (num_actions as u128).checked_pow(num_states as u32);
    let mut current = Some(vec![0usize; num_states]);
    let mut remaining = total.unwrap_or(u128::MAX);
    std::iter::from_fn(move || {
        if remaining == 0 {
            return None;
        }
        remaining -= 1;
        let out = current.clone()?;
        if let Some(cur) = current.as_mut() {
            let mut i = num_states;
            loop {
                if i == 0 {
                    current = None;
                    break;
                }
                i -= 1;
                cur[i] += 1;
                if cur[i] < num_actions {
                    break;
                }
                cur[i] = 0;
            }
        }
        Some(Policy(out))
    })
}

/// Policies whose value under `y` is within `gap_tol` of the best, by exhaustive enumeration.
pub fn optimal_policy_set(env: &Environment, y: &[f64], gap_tol: f64) -> Result<Vec<Policy>> {
    env.check_reward(y)?;
    let values: Vec<(Policy, f64)> = enumerate_policies(env.num_states, env.num_actions)
        .map(|pi| {
            let v = policy_value(env, y, &pi)?;
            Ok((pi, v))
        })
        .collect::<Result<_>>()?;
    let best = values
        .iter()
        .map(|(_, v)| *v)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(values
        .into_iter()
        .filter(|(_, v)| *v >= best - gap_tol)
        .map(|(pi, _)| pi)
        .collect())
}

fn random_simplex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    // exponential spacings give the uniform distribution on the simplex
    let w: Vec<f64> = (0..n)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Random environment with Dirichlet(1) rows and initial distribution.
pub fn random_environment<R: Rng + ?Sized>(
    num_states: usize,
    num_actions: usize,
    gamma: f64,
    rng: &mut R,
) -> Result<Environment> {
    let mu = random_simplex(num_states, rng);
    let transitions = (0..num_states)
        .map(|_| {
            (0..num_actions)
                .map(|_| random_simplex(num_states, rng))
                .collect()
        })
        .collect();
    Environment::new(gamma, mu, transitions)
}
