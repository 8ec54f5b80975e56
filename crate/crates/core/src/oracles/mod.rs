//! The other side of the protocol: the human who judges and demonstrates, and
//! the parties that choose tasks (adversary, fixed-environment designer, probe,
//! random nature).
//!
//! Only [`HumanOracle`] holds the hidden reward. Learners interact with it
//! through verdicts, flags and demonstrations.

mod adversary;
mod designer;
mod human;
pub mod nature;

pub use adversary::{adversary_to_mdp_stream, AdversaryState};
pub use designer::{designer_next, FixedEnvDesigner, ProbeOutcome};
pub use human::{Demonstration, HumanOracle, TaskJudge, Verdict, WorstCase};
