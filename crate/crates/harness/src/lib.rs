//! Seeded experiment runs for the repeated reward-learning agents: configs,
//! worker pool, round logs, CSV summaries and bound checks.

pub mod config;
mod error;
pub mod report;
pub mod run;

pub use config::{ExperimentConfig, ExperimentKind};
pub use error::{HarnessError, Result};
pub use report::{check_bounds, CheckOutcome, RunRecord, RunReport};
pub use run::run_experiment;
