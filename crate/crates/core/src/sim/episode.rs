use alloc::string::String;
use alloc::vec::Vec;

use super::{
    apply_motion, choose_start, explored_cells, measure_ratio, rasterize, simulate_scan, update_known_map, FloorPlan,
    GroundTruthGrid, SimError,
};
use crate::explore::{optimal_action, ActionScaling, ExplorationModel, LidarModel, OccupancyGrid, Pose};
use crate::idiom::{make_plan, DecisionConfig, EnvironmentModel, PastStateBuffer};
use crate::prob::{Distribution, RandomStream};
use crate::svi::SviConfig;

/// Simulator settings.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields, default))]
pub struct SimConfig {
    /// Grid resolution (m/cell).
    pub resolution: f64,
    /// Robot disc radius (m).
    pub robot_radius: f64,
    pub step_budget: usize,
    /// Episode ends once the explored ratio exceeds this.
    pub termination_ratio: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { resolution: 0.2, robot_radius: 0.15, step_budget: 200, termination_ratio: 0.95 }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.resolution > 0.0 && self.resolution.is_finite()) {
            return Err(SimError::InvalidConfig("sim.resolution"));
        }
        if !(self.robot_radius > 0.0 && self.robot_radius.is_finite()) {
            return Err(SimError::InvalidConfig("sim.robot_radius"));
        }
        if !(0.0..=1.0).contains(&self.termination_ratio) {
            return Err(SimError::InvalidConfig("sim.termination_ratio"));
        }
        Ok(())
    }

    /// Distance kept from the contact point after a collision (m).
    pub fn backoff(&self) -> f64 {
        0.5 * self.resolution
    }
}

/// Every setting an episode needs.
#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields, default))]
pub struct EpisodeConfig {
    pub sim: SimConfig,
    pub planner: DecisionConfig,
    pub svi: SviConfig,
    pub lidar: LidarModel,
    pub action: ActionScaling,
}

impl EpisodeConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        self.sim.validate()?;
        self.planner.validate()?;
        self.svi.validate().map_err(crate::idiom::IdiomError::from)?;
        self.lidar.validate()?;
        self.action.validate()?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Termination {
    Budget,
    Ratio,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Budget => "budget",
            Termination::Ratio => "ratio",
        }
    }
}

/// Mutable simulator state of one episode.
#[derive(Clone, Debug)]
pub struct EpisodeState {
    pub pose: Pose,
    pub known: OccupancyGrid,
    pub buffer: PastStateBuffer,
    pub step: usize,
    pub collisions: usize,
    pub ratios: Vec<f64>,
    pub trajectory: Vec<Pose>,
    pub collision_points: Vec<Pose>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EpisodeReport {
    pub map_id: String,
    pub seed: u64,
    pub steps: usize,
    pub explored_ratio: f64,
    pub explored_m2: f64,
    /// Free area of the rasterized map (m²).
    pub area_m2: f64,
    pub rooms: Option<usize>,
    pub collisions: usize,
    pub termination: Termination,
    /// Poses visited, starting with the initial one.
    pub trajectory: Vec<Pose>,
    pub ratio_series: Vec<f64>,
    pub collision_points: Vec<Pose>,
    /// Predicted future positions of the last plan, one list per sample.
    pub plan_fan: Vec<Vec<Pose>>,
    pub known_map: OccupancyGrid,
    /// Filled in by callers that have a clock.
    pub wall_time_s: f64,
}

const STREAM_START: u64 = 1;
const STREAM_SCAN: u64 = 2;
const STREAM_PLAN: u64 = 3;

/// Runs one exploration episode on `plan`. Given the same plan, config and
/// seed the report is identical (wall time aside).
pub fn run_episode(plan: &FloorPlan, cfg: &EpisodeConfig, seed: u64) -> Result<EpisodeReport, SimError> {
    cfg.validate()?;
    let truth = rasterize(plan, cfg.sim.resolution)?;
    run_episode_on(&truth, &plan.id, plan.rooms, cfg, seed)
}

/// [`run_episode`] on an already rasterized map.
pub fn run_episode_on(
    truth: &GroundTruthGrid,
    map_id: &str,
    rooms: Option<usize>,
    cfg: &EpisodeConfig,
    seed: u64,
) -> Result<EpisodeReport, SimError> {
    cfg.validate()?;
    let root = RandomStream::new(seed, 0);
    let start = choose_start(truth, cfg.sim.robot_radius + cfg.planner.d_min, &mut root.split(STREAM_START))?;
    let g = truth.grid();
    let mut state = EpisodeState {
        pose: start,
        known: OccupancyGrid::unknown(g.width(), g.height(), g.resolution(), g.origin())?,
        buffer: PastStateBuffer::new(cfg.planner.past_capacity),
        step: 0,
        collisions: 0,
        ratios: Vec::new(),
        trajectory: alloc::vec![start],
        collision_points: Vec::new(),
    };
    let scan_root = root.split(STREAM_SCAN);
    let plan_root = root.split(STREAM_PLAN);
    let mut termination = Termination::Budget;
    let mut fan = Vec::new();
    while state.step < cfg.sim.step_budget {
        let t = state.step as u64;
        let ranges = simulate_scan(truth, state.pose, &cfg.lidar, &mut scan_root.split(t))?;
        update_known_map(&mut state.known, state.pose, &ranges, &cfg.lidar)?;
        let ratio = measure_ratio(&state.known, truth)?;
        state.ratios.push(ratio);
        state.step += 1;
        if ratio > cfg.sim.termination_ratio {
            termination = Termination::Ratio;
            break;
        }
        let marginal = Distribution::normal_diag(state.pose.to_vec(), cfg.action.sigma_a.to_vec())?;
        state.buffer.push(t, marginal)?;
        let env = ExplorationModel::new(&state.known, &cfg.lidar, &cfg.action, state.pose);
        let plan = make_plan(&env, &env.initial_state(), &state.buffer, &cfg.planner, &cfg.svi, &mut plan_root.split(t))?;
        let displacement = optimal_action(plan.first_motors(), &cfg.action)?;
        fan = plan
            .trajectories
            .iter()
            .map(|tr| tr.states.iter().map(|s| Pose::new(s[0], s[1])).collect())
            .collect();
        let out = apply_motion(truth, state.pose, displacement, cfg.sim.robot_radius, cfg.sim.backoff())?;
        if let Some(c) = out.contact {
            state.collisions += 1;
            state.collision_points.push(c);
        }
        state.pose = out.pose;
        state.trajectory.push(out.pose);
    }
    let res2 = g.resolution() * g.resolution();
    Ok(EpisodeReport {
        map_id: map_id.into(),
        seed,
        steps: state.step,
        explored_ratio: state.ratios.last().copied().unwrap_or(0.0),
        explored_m2: explored_cells(&state.known, truth)? as f64 * res2,
        area_m2: truth.free_area(),
        rooms,
        collisions: state.collisions,
        termination,
        trajectory: state.trajectory,
        ratio_series: state.ratios,
        collision_points: state.collision_points,
        plan_fan: fan,
        known_map: state.known,
        wall_time_s: 0.0,
    })
}
