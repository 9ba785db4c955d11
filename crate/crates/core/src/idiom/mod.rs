//! Decision idiom: progress, information-gain, constraint and attention
//! pseudo-probabilities, and the rollout program optimized by
//! [`make_plan`].

mod buffer;
mod config;
mod env;
mod lautum;
mod planning;
mod progress;

pub use buffer::PastStateBuffer;
pub use config::{DecisionConfig, ProgressSign};
pub use env::{
    attention_probability, constraint_probability, constraint_satisfaction, information_probability,
    modality_information, EnvironmentModel, GuideParam,
};
pub use lautum::{lautum_estimate, lautum_from_samples, LOG_LIKELIHOOD_FLOOR};
pub use planning::{
    attention_site, attention_terms, make_plan, motor_site, planning_program, state_site, AttentionTerms, Plan,
    PlanningGuide, PlanningModel, PlanningProgram, Trajectory, VariationalParams,
};
pub use progress::{
    combine_progress, decay_weights, progress_probability, progress_probability_clamped, progress_score,
};

use crate::prob::ProbError;
use crate::svi::SviError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IdiomError {
    #[error(transparent)]
    Prob(#[from] ProbError),
    #[error(transparent)]
    Svi(#[from] SviError),
    #[error("need {needed} past states, buffer holds {available}")]
    InsufficientHistory { needed: usize, available: usize },
    #[error("timestep {got} does not follow {last}")]
    NonIncreasingTimestep { last: u64, got: u64 },
    #[error("sub-sampled index set is empty")]
    EmptySubset,
    #[error("planning horizon is zero")]
    EmptyProgram,
    #[error("no samples")]
    EmptySamples,
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
}
