//! Pseudo-SLAM grid simulator: floor-plan rasterization, lidar scans,
//! deterministic map writes, swept-disc motion and the episode loop.

mod episode;
mod floorplan;
mod motion;
mod sensing;

pub use episode::{run_episode, run_episode_on, EpisodeConfig, EpisodeReport, EpisodeState, SimConfig, Termination};
pub use floorplan::{rasterize, FloorPlan, GroundTruthGrid};
pub use motion::{apply_motion, choose_start, clearance, MotionOutcome};
pub use sensing::{explored_cells, measure_ratio, simulate_scan, true_range, update_known_map};

use crate::explore::ExploreError;
use crate::idiom::IdiomError;
use crate::prob::ProbError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("geometry error: {0}")]
    Geometry(&'static str),
    #[error("pose ({x}, {y}) is not in free space")]
    InvalidPose { x: f64, y: f64 },
    #[error("no free cell leaves enough clearance for the robot")]
    NoStart,
    #[error("known map and ground truth differ in geometry")]
    Alignment,
    #[error("scan has {got} ranges, expected {expected}")]
    ScanLength { expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Explore(#[from] ExploreError),
    #[error(transparent)]
    Idiom(#[from] IdiomError),
}

impl From<ProbError> for SimError {
    fn from(e: ProbError) -> Self {
        SimError::Explore(ExploreError::Prob(e))
    }
}
