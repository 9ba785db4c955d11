use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use super::{motor_prior, BeamHit, subsample_beams, trace_into, ActionScaling, HitProfile, LidarModel, OccupancyGrid, Pose};
use crate::idiom::{DecisionConfig, EnvironmentModel, GuideParam, IdiomError};
use crate::prob::{Distribution, ProbError, RandomStream};

/// Exploration environment: planar position state, lidar beams as
/// modalities and constraints, and the known map as long-term memory.
///
/// A memory sample for a beam is its first-hit distance, which is all the
/// beam likelihood and the clearance constraint depend on; the distance
/// carries the beam model's normalizer so it is computed once per sample.
#[derive(Clone, Debug)]
pub struct ExplorationModel<'a> {
    pub grid: &'a OccupancyGrid,
    pub lidar: &'a LidarModel,
    pub scaling: &'a ActionScaling,
    pub pose: Pose,
}

impl<'a> ExplorationModel<'a> {
    pub fn new(grid: &'a OccupancyGrid, lidar: &'a LidarModel, scaling: &'a ActionScaling, pose: Pose) -> Self {
        Self { grid, lidar, scaling, pose }
    }

    /// First-hit distribution of beam `beam` cast from `state`.
    pub fn hit_profile(&self, beam: usize, state: &[f64]) -> HitProfile {
        let mut cells = Vec::new();
        let pose = Pose::new(state[0], state[1]);
        trace_into(self.grid, pose, self.lidar.beam_angle(beam), self.lidar.max_range, &mut cells);
        HitProfile::new(self.grid, &cells, self.lidar.max_range)
    }
}

impl EnvironmentModel for ExplorationModel<'_> {
    type Ltm = BeamHit;
    type Percept = f64;

    fn initial_state(&self) -> Distribution {
        Distribution::NormalDiag { mean: self.pose.to_vec(), std: self.scaling.sigma_a.to_vec() }
    }

    fn motor_prior(&self, _state: &[f64]) -> Result<Distribution, ProbError> {
        Ok(motor_prior())
    }

    fn guide_params(&self) -> Vec<GuideParam> {
        vec![
            GuideParam { name: "alpha".to_string(), init: vec![1.0, 1.0], positive: true },
            GuideParam { name: "beta".to_string(), init: vec![1.0, 1.0], positive: true },
        ]
    }

    fn motor_guide(&self, _state: &[f64], params: &[Vec<f64>]) -> Result<Distribution, ProbError> {
        match params {
            [a, b] => Distribution::beta(a.clone(), b.clone()),
            _ => Err(ProbError::Shape { expected: 2, got: params.len() }),
        }
    }

    fn transition(&self, state: &[f64], motor: &[f64]) -> Result<Distribution, ProbError> {
        if state.len() != 2 || motor.len() != 2 {
            return Err(ProbError::Shape { expected: 2, got: state.len().min(motor.len()) });
        }
        let d = self.scaling.apply([motor[0], motor[1]]);
        Distribution::normal_diag(vec![state[0] + d[0], state[1] + d[1]], self.scaling.sigma_a.to_vec())
    }

    fn sample_ltm(&self, modality: usize, state: &[f64], count: usize, rng: &mut RandomStream) -> Vec<BeamHit> {
        let profile = self.hit_profile(modality, state);
        let mut out: Vec<BeamHit> = Vec::with_capacity(count);
        for _ in 0..count {
            let d = profile.sample(rng);
            let hit = match out.iter().find(|h| h.distance == d) {
                Some(h) => *h,
                None => BeamHit::new(self.lidar, d),
            };
            out.push(hit);
        }
        out
    }

    fn sample_percept_prior(&self, _modality: usize, _state: &[f64], count: usize, rng: &mut RandomStream) -> Vec<f64> {
        (0..count).map(|_| rng.uniform() * self.lidar.max_range).collect()
    }

    fn perception_log_likelihood(&self, _modality: usize, _state: &[f64], ltm: &BeamHit, percept: &f64) -> f64 {
        self.lidar.log_density_hit(ltm, *percept)
    }

    fn sample_percept(&self, _modality: usize, _state: &[f64], ltm: &BeamHit, rng: &mut RandomStream) -> f64 {
        self.lidar.sample_measurement(ltm.distance, rng)
    }

    fn constraint_distance(&self, _constraint: usize, _state: &[f64], percept: &f64, _ltm: &BeamHit, cfg: &DecisionConfig) -> f64 {
        super::constraint_distance(*percept, cfg.d_min)
    }

    fn information_subset(&self, cfg: &DecisionConfig, rng: &mut RandomStream) -> Result<Vec<usize>, IdiomError> {
        subsample_beams(self.lidar.beam_count, cfg.info_subset, rng)
            .map_err(|_| IdiomError::InvalidConfig("planner.info_subset"))
    }

    fn constraint_subset(&self, cfg: &DecisionConfig, rng: &mut RandomStream) -> Result<Vec<usize>, IdiomError> {
        subsample_beams(self.lidar.beam_count, cfg.constraint_subset, rng)
            .map_err(|_| IdiomError::InvalidConfig("planner.constraint_subset"))
    }
}
