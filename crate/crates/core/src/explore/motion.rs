use alloc::vec;
use alloc::vec::Vec;

use super::ExploreError;
use crate::prob::{Distribution, ProbError};

/// Planar position in metres.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Pose {
    pub x: f64,
    pub y: f64,
}

impl Pose {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_slice(v: &[f64]) -> Result<Self, ExploreError> {
        match v {
            [x, y] if x.is_finite() && y.is_finite() => Ok(Self::new(*x, *y)),
            [_, _] => Err(ExploreError::Domain("pose coordinates must be finite")),
            _ => Err(ExploreError::Prob(ProbError::Shape { expected: 2, got: v.len() })),
        }
    }

    pub fn to_vec(self) -> Vec<f64> {
        vec![self.x, self.y]
    }

    pub fn offset(self, d: [f64; 2]) -> Self {
        Self::new(self.x + d[0], self.y + d[1])
    }

    pub fn distance(self, other: Pose) -> f64 {
        libm::hypot(self.x - other.x, self.y - other.y)
    }
}

/// Motor command with both components in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MotorCommand {
    u: [f64; 2],
}

impl MotorCommand {
    pub fn new(u: [f64; 2]) -> Result<Self, ExploreError> {
        if u.iter().all(|v| (0.0..=1.0).contains(v)) {
            Ok(Self { u })
        } else {
            Err(ExploreError::Domain("motor components must lie in [0, 1]"))
        }
    }

    pub fn from_slice(v: &[f64]) -> Result<Self, ExploreError> {
        match v {
            [a, b] => Self::new([*a, *b]),
            _ => Err(ExploreError::Prob(ProbError::Shape { expected: 2, got: v.len() })),
        }
    }

    pub fn values(&self) -> [f64; 2] {
        self.u
    }
}

/// Affine map from motor commands to displacements plus motion noise.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields, default))]
pub struct ActionScaling {
    pub delta_lo: [f64; 2],
    pub delta_hi: [f64; 2],
    /// Per-axis standard deviation of the motion noise (m).
    pub sigma_a: [f64; 2],
}

impl Default for ActionScaling {
    fn default() -> Self {
        Self { delta_lo: [-1.0, -1.0], delta_hi: [1.0, 1.0], sigma_a: [0.05, 0.05] }
    }
}

impl ActionScaling {
    pub fn validate(&self) -> Result<(), ExploreError> {
        for k in 0..2 {
            if !(self.delta_lo[k] < self.delta_hi[k]) || !self.delta_lo[k].is_finite() || !self.delta_hi[k].is_finite() {
                return Err(ExploreError::InvalidConfig("action.delta_lo"));
            }
            if !(self.sigma_a[k] > 0.0 && self.sigma_a[k].is_finite()) {
                return Err(ExploreError::InvalidConfig("action.sigma_a"));
            }
        }
        Ok(())
    }

    /// Displacement `A(u)`.
    pub fn apply(&self, u: [f64; 2]) -> [f64; 2] {
        [
            self.delta_lo[0] + u[0] * (self.delta_hi[0] - self.delta_lo[0]),
            self.delta_lo[1] + u[1] * (self.delta_hi[1] - self.delta_lo[1]),
        ]
    }
}

/// `N(pose + A(u), σ_a)`.
pub fn transition_distribution(pose: Pose, u: &MotorCommand, scaling: &ActionScaling) -> Result<Distribution, ExploreError> {
    let d = scaling.apply(u.values());
    let p = pose.offset(d);
    Ok(Distribution::normal_diag(vec![p.x, p.y], scaling.sigma_a.to_vec())?)
}

pub fn motor_prior() -> Distribution {
    Distribution::Uniform { lo: vec![0.0, 0.0], hi: vec![1.0, 1.0] }
}

/// Independent Beta per axis.
pub fn motor_guide(alpha: [f64; 2], beta: [f64; 2]) -> Result<Distribution, ExploreError> {
    Ok(Distribution::beta(alpha.to_vec(), beta.to_vec())?)
}

/// Mean displacement over a set of motor samples.
pub fn optimal_action<'a, I>(samples: I, scaling: &ActionScaling) -> Result<[f64; 2], ExploreError>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut sum = [0.0; 2];
    let mut n = 0usize;
    for s in samples {
        let u = MotorCommand::from_slice(s)?.values();
        sum[0] += u[0];
        sum[1] += u[1];
        n += 1;
    }
    if n == 0 {
        return Err(ExploreError::EmptySamples);
    }
    let mean = [sum[0] / n as f64, sum[1] / n as f64];
    Ok(scaling.apply(mean))
}
