//! Repeated inverse reinforcement learning.
//!
//! An agent acts on behalf of a human across a sequence of tasks. Every task
//! carries a public reward `R`; the human additionally cares about a hidden,
//! task-invariant reward `theta_star`, and judges the agent against
//! `theta_star + R`. This crate provides:
//!
//! - [`mdp`]: exact finite-MDP planning, occupancies, losses and rollouts;
//! - [`reward_space`]: behavioral equivalence and canonical reward vectors;
//! - [`bandit`]: the linear-bandit view of tasks and the MDP <-> bandit reductions;
//! - [`ellipsoid`]: central-cut ellipsoid geometry;
//! - [`learners`]: the binary-search identifier, the ellipsoid learner and its
//!   trajectory/mini-batch variant;
//! - [`oracles`]: the human, the adversarial task stream, the fixed-environment
//!   task designer and the identification probe;
//! - [`bounds`]: closed-form guarantees used to check runs.

// `!(x > 0.0)` style checks also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bandit;
pub mod bounds;
pub mod ellipsoid;
mod error;
pub mod learners;
pub mod mdp;
pub mod oracles;
pub mod reward_space;
pub mod rng;

pub use error::{Error, Result};
pub use nalgebra;
