//! Hidden reward vectors, task rewards and behavioral equivalence.
//!
//! Two reward vectors induce the same optimal policies in every task exactly
//! when they differ by a constant shift. A class is represented by its member
//! that is zero at a reference state.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::mdp::Environment;
use crate::{Error, Result};

/// Default tolerance for [`behaviorally_equivalent`].
pub const EQUIVALENCE_TOL: f64 = 1e-9;

/// The human's cross-task reward (or any candidate for it).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaVector {
    pub values: Vec<f64>,
    /// Reference state fixed to zero, when canonicalized.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_ref: Option<usize>,
}

impl ThetaVector {
    pub fn new(values: Vec<f64>) -> Self {
        ThetaVector {
            values,
            s_ref: None,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn sup_norm(&self) -> f64 {
        sup_norm(&self.values)
    }

    /// `theta` with the reference coordinate removed (bandit form).
    pub fn drop_coordinate(&self, s: usize) -> ThetaVector {
        let mut values = self.values.clone();
        values.remove(s);
        ThetaVector::new(values)
    }
}

/// Public per-task reward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TaskReward(pub Vec<f64>);

impl TaskReward {
    pub fn zeros(n: usize) -> Self {
        TaskReward(vec![0.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub(crate) fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Shifts `theta` so that it is zero at `s_ref`.
pub fn canonicalize(theta: &ThetaVector, s_ref: usize) -> ThetaVector {
    let shift = theta.values[s_ref];
    let mut values: Vec<f64> = theta.values.iter().map(|v| v - shift).collect();
    values[s_ref] = 0.0;
    ThetaVector {
        values,
        s_ref: Some(s_ref),
    }
}

/// True iff `a - b` is within `tol` (sup-norm) of some constant vector.
pub fn behaviorally_equivalent(a: &ThetaVector, b: &ThetaVector, tol: f64) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "theta lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let (lo, hi) = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| x - y)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| {
            (lo.min(d), hi.max(d))
        });
    Ok(a.is_empty() || (hi - lo) / 2.0 <= tol)
}

/// I.i.d. `Unif[-1, 1]` entries; with a reference state, that entry is zero so the
/// result is canonical and still inside `[-1, 1]^d`.
pub fn sample_theta<R: Rng + ?Sized>(d: usize, s_ref: Option<usize>, rng: &mut R) -> Result<ThetaVector> {
    if d == 0 {
        return Err(Error::InvalidInput("theta dimension must be >= 1".into()));
    }
    if let Some(s) = s_ref {
        if s >= d {
            return Err(Error::InvalidInput(format!("reference state {s} >= {d}")));
        }
    }
    let mut values: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..=1.0)).collect();
    if let Some(s) = s_ref {
        values[s] = 0.0;
    }
    Ok(ThetaVector { values, s_ref })
}

/// Builds a task on which `theta` and `other` have different optimal policies.
///
/// The task reward is `-other`, making every policy optimal for `other`. With
/// `i` the state where `theta + R` is smallest and `j` where it is largest, `j`
/// is absorbing and `i` offers a self-loop (action 0) or a move to `j`
/// (action 1); the episode starts at `i`. Every other state self-loops. Returns
/// `None` when the two vectors are equivalent within `tol`.
pub fn separating_task(
    theta: &ThetaVector,
    other: &ThetaVector,
    gamma: f64,
    tol: f64,
) -> Result<Option<(Environment, TaskReward)>> {
    if behaviorally_equivalent(theta, other, tol)? {
        return Ok(None);
    }
    let n = theta.len();
    let r: Vec<f64> = other.values.iter().map(|v| -v).collect();
    let y: Vec<f64> = theta.values.iter().zip(&r).map(|(a, b)| a + b).collect();
    let (mut i, mut j) = (0, 0);
    for s in 0..n {
        if y[s] < y[i] {
            i = s;
        }
        if y[s] > y[j] {
            j = s;
        }
    }
    let point = |t: usize| {
        let mut p = vec![0.0; n];
        p[t] = 1.0;
        p
    };
    let transitions = (0..n)
        .map(|s| {
            if s == i {
                vec![point(i), point(j)]
            } else {
                vec![point(s), point(s)]
            }
        })
        .collect();
    let env = Environment::new(gamma, point(i), transitions)?;
    Ok(Some((env, TaskReward(r))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::optimal_policy_set;
    use crate::rng;
    use proptest::prelude::*;

    #[test]
    fn canonicalize_subtracts_reference_entry() {
        let t = ThetaVector::new(vec![0.5, -0.2, 0.1]);
        let c = canonicalize(&t, 0);
        assert_eq!(c.values[0], 0.0);
        assert!((c.values[1] + 0.7).abs() < 1e-15);
        assert!((c.values[2] + 0.4).abs() < 1e-15);
        assert_eq!(c.s_ref, Some(0));
    }

    #[test]
    fn equivalence_detects_shift_and_perturbation() {
        let t = ThetaVector::new(vec![0.3, -0.9, 0.2, 0.0]);
        let shifted = ThetaVector::new(t.values.iter().map(|v| v + 0.7).collect());
        assert!(behaviorally_equivalent(&t, &shifted, EQUIVALENCE_TOL).unwrap());
        let mut bumped = t.clone();
        bumped.values[2] += 10.0 * EQUIVALENCE_TOL;
        assert!(!behaviorally_equivalent(&t, &bumped, EQUIVALENCE_TOL).unwrap());
        assert!(behaviorally_equivalent(&t, &ThetaVector::new(vec![0.0]), 1e-9).is_err());
    }

    #[test]
    fn sample_theta_is_seeded_and_canonical() {
        let a = sample_theta(6, None, &mut rng::seeded(4)).unwrap();
        let b = sample_theta(6, None, &mut rng::seeded(4)).unwrap();
        assert_eq!(a, b);
        assert!(a.sup_norm() <= 1.0);
        let c = sample_theta(6, Some(2), &mut rng::seeded(4)).unwrap();
        assert_eq!(c.values[2], 0.0);
        assert!(sample_theta(0, None, &mut rng::seeded(4)).is_err());
    }

    #[test]
    fn sample_theta_coordinate_means_near_zero() {
        let mut rng = rng::seeded(99);
        let n = 100_000;
        let mut sums = [0.0; 3];
        for _ in 0..n {
            let t = sample_theta(3, None, &mut rng).unwrap();
            for (s, v) in sums.iter_mut().zip(&t.values) {
                *s += v;
            }
        }
        for s in sums {
            assert!((s / n as f64).abs() <= 0.02);
        }
    }

    #[test]
    fn separating_task_splits_optimal_sets() {
        let t = ThetaVector::new(vec![0.1, 0.5, -0.4]);
        let o = ThetaVector::new(vec![0.0, 0.0, 0.0]);
        let (env, r) = separating_task(&t, &o, 0.9, EQUIVALENCE_TOL).unwrap().unwrap();
        let y_t: Vec<f64> = t.values.iter().zip(&r.0).map(|(a, b)| a + b).collect();
        let y_o: Vec<f64> = o.values.iter().zip(&r.0).map(|(a, b)| a + b).collect();
        let set_t = optimal_policy_set(&env, &y_t, 1e-8).unwrap();
        let set_o = optimal_policy_set(&env, &y_o, 1e-8).unwrap();
        assert_ne!(set_t, set_o);
        assert_eq!(set_o.len(), 8);
        let shifted = ThetaVector::new(vec![1.0, 1.0, 1.0]);
        assert!(separating_task(&o, &shifted, 0.9, EQUIVALENCE_TOL).unwrap().is_none());
    }

    proptest! {
        #[test]
        fn canonicalize_is_idempotent_and_shift_invariant(
            values in proptest::collection::vec(-1.0f64..1.0, 1..8),
            shift in -3.0f64..3.0,
            s_seed in 0usize..100,
        ) {
            let s = s_seed % values.len();
            let t = ThetaVector::new(values.clone());
            let c = canonicalize(&t, s);
            let cc = canonicalize(&c, s);
            prop_assert_eq!(&c.values, &cc.values);
            let shifted = ThetaVector::new(values.iter().map(|v| v + shift).collect());
            let cs = canonicalize(&shifted, s);
            for (a, b) in c.values.iter().zip(&cs.values) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }

        #[test]
        fn distinct_canonical_vectors_are_not_equivalent(
            a in proptest::collection::vec(-1.0f64..1.0, 2..6),
            delta in 1e-6f64..1.0,
            k in 1usize..6,
        ) {
            let s = 0;
            let ca = canonicalize(&ThetaVector::new(a.clone()), s);
            let mut b = ca.clone();
            let k = k % (a.len() - 1) + 1;
            b.values[k] += delta;
            prop_assert!(!behaviorally_equivalent(&ca, &b, EQUIVALENCE_TOL).unwrap());
        }
    }
}
