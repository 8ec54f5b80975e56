//! Agents: the binary-search identifier, the ellipsoid learner for bandit
//! tasks and its trajectory-feedback variant for MDPs.

mod ellipsoid_learner;
mod identify;
mod trajectory;

pub use ellipsoid_learner::{LearnerState, Lexicographic, RoundOutcome, TieBreak, UpdateOutcome, GREEDY_TIE_TOL};
pub use identify::{build_probe_environment, omniscient_identify, IdentificationResult};
pub use trajectory::{BatchCut, BatchState, EpisodeLog, TrajectoryConfig, TrajectoryLearner};
