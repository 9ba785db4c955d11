//! Exploration instantiation: planar poses, scaled relative motions, the
//! occupancy grid, lidar ray tracing and beam model.

mod grid;
mod lidar;
mod model;
mod motion;
mod ray;

pub use grid::{OccupancyGrid, P_FREE, P_OCCUPIED, P_UNKNOWN};
pub use lidar::{clearance_indicator, BeamHit, constraint_distance, subsample_beams, LidarModel};
pub use model::ExplorationModel;
pub use motion::{motor_guide, motor_prior, optimal_action, transition_distribution, ActionScaling, MotorCommand, Pose};
pub use ray::{ray_trace, sample_ray_map, HitProfile, RayCell};
pub(crate) use ray::trace_into;

use crate::prob::ProbError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExploreError {
    #[error(transparent)]
    Prob(#[from] ProbError),
    #[error("pose ({x}, {y}) lies outside the grid")]
    OutOfBounds { x: f64, y: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("no samples")]
    EmptySamples,
}
