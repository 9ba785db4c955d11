use alloc::vec::Vec;
use core::f64::consts::PI;

use super::ExploreError;
use crate::prob::special::normal_cdf;
use crate::prob::{smooth_indicator, Distribution, RandomStream};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Planar lidar with evenly spaced beams and a four-part beam model.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields, default))]
pub struct LidarModel {
    pub beam_count: usize,
    /// Maximum range (m).
    pub max_range: f64,
    pub w_hit: f64,
    pub w_short: f64,
    pub w_rand: f64,
    pub w_max: f64,
    /// Standard deviation of the hit component (m).
    pub sigma_hit: f64,
    /// Rate of the short-reading component (1/m).
    pub lambda_short: f64,
}

impl Default for LidarModel {
    fn default() -> Self {
        Self {
            beam_count: 360,
            max_range: 4.0,
            w_hit: 0.85,
            w_short: 0.0,
            w_rand: 0.10,
            w_max: 0.05,
            sigma_hit: 0.2,
            lambda_short: 1.0,
        }
    }
}

impl LidarModel {
    pub fn validate(&self) -> Result<(), ExploreError> {
        if self.beam_count == 0 {
            return Err(ExploreError::InvalidConfig("lidar.beam_count"));
        }
        if !(self.max_range > 0.0 && self.max_range.is_finite()) {
            return Err(ExploreError::InvalidConfig("lidar.max_range"));
        }
        let w = [self.w_hit, self.w_short, self.w_rand, self.w_max];
        if w.iter().any(|v| !(*v >= 0.0)) || (w.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(ExploreError::InvalidConfig("lidar.w_hit"));
        }
        if !(self.sigma_hit > 0.0 && self.sigma_hit <= self.max_range) {
            return Err(ExploreError::InvalidConfig("lidar.sigma_hit"));
        }
        if !(self.lambda_short > 0.0 && self.lambda_short.is_finite()) {
            return Err(ExploreError::InvalidConfig("lidar.lambda_short"));
        }
        Ok(())
    }

    /// Direction of beam `i` (rad).
    pub fn beam_angle(&self, i: usize) -> f64 {
        2.0 * PI * i as f64 / self.beam_count as f64
    }

    /// Log-density of measuring `z` when the first obstacle is at `d_true`.
    pub fn beam_likelihood(&self, d_true: f64, z: f64) -> Result<f64, ExploreError> {
        if !(0.0..=self.max_range).contains(&z) {
            return Err(ExploreError::Domain("measurement outside [0, max range]"));
        }
        if !(d_true > 0.0 && d_true <= self.max_range) {
            return Err(ExploreError::Domain("true distance outside (0, max range]"));
        }
        Ok(self.log_density(d_true, z))
    }

    /// [`LidarModel::beam_likelihood`] without argument checks; `z` outside
    /// the range gives `-inf`.
    pub fn log_density(&self, d_true: f64, z: f64) -> f64 {
        self.log_density_hit(&BeamHit::new(self, d_true), z)
    }

    /// Log of the hit component's normalizing factor at `d_true`, including
    /// its weight.
    pub fn hit_log_norm(&self, d_true: f64) -> f64 {
        if self.w_hit <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let s = self.sigma_hit;
        let (a, b) = (-d_true / s, (self.max_range - d_true) / s);
        let tail = |x: f64| if x < -9.0 { 0.0 } else if x > 9.0 { 1.0 } else if x == 0.0 { 0.5 } else { normal_cdf(x) };
        let eta = tail(b) - tail(a);
        if eta > 0.0 {
            libm::log(self.w_hit / (s * eta)) - LN_SQRT_2PI
        } else {
            f64::NEG_INFINITY
        }
    }

    /// Log-density for a prepared first hit.
    pub fn log_density_hit(&self, hit: &BeamHit, z: f64) -> f64 {
        let zmax = self.max_range;
        if !(0.0..=zmax).contains(&z) {
            return f64::NEG_INFINITY;
        }
        let in_max_bin = self.w_max > 0.0 && z >= zmax - self.sigma_hit;
        let d_true = hit.distance;
        let (floor, ln_floor) = if self.w_short > 0.0 && z <= d_true && d_true > 0.0 {
            let l = self.lambda_short;
            let mut f = self.w_rand / zmax + self.w_short * l * libm::exp(-l * z) / (1.0 - libm::exp(-l * d_true));
            if in_max_bin {
                f += self.w_max / self.sigma_hit;
            }
            (f, libm::log(f))
        } else {
            hit.floor[in_max_bin as usize]
        };
        let r = (z - d_true) / self.sigma_hit;
        let q = -0.5 * r * r + hit.hit_log_norm;
        if q < ln_floor - 40.0 {
            return ln_floor;
        }
        libm::log(libm::exp(q) + floor)
    }

    /// Draws a measurement from the beam model.
    pub fn sample_measurement(&self, d_true: f64, rng: &mut RandomStream) -> f64 {
        let zmax = self.max_range;
        let u = rng.uniform();
        let z = if u < self.w_hit {
            let mut z = None;
            for _ in 0..64 {
                let c = d_true + self.sigma_hit * rng.standard_normal();
                if (0.0..=zmax).contains(&c) {
                    z = Some(c);
                    break;
                }
            }
            z.unwrap_or(d_true)
        } else if u < self.w_hit + self.w_short {
            let l = self.lambda_short;
            let mass = 1.0 - libm::exp(-l * d_true);
            -libm::log(1.0 - rng.uniform() * mass) / l
        } else if u < self.w_hit + self.w_short + self.w_rand {
            rng.uniform() * zmax
        } else {
            zmax - rng.uniform() * self.sigma_hit
        };
        z.clamp(0.0, zmax)
    }

    /// `U(0, max_range)`.
    pub fn perception_prior(&self) -> Distribution {
        Distribution::Uniform { lo: alloc::vec![0.0], hi: alloc::vec![self.max_range] }
    }
}

/// A first-hit distance together with the hit component's normalizer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeamHit {
    pub distance: f64,
    hit_log_norm: f64,
    // (value, log) of the uniform part, without and with the max-range bin
    floor: [(f64, f64); 2],
}

impl BeamHit {
    pub fn new(lidar: &LidarModel, distance: f64) -> Self {
        let lo = lidar.w_rand / lidar.max_range;
        let hi = lo + lidar.w_max / lidar.sigma_hit;
        Self {
            distance,
            hit_log_norm: lidar.hit_log_norm(distance),
            floor: [(lo, libm::log(lo)), (hi, libm::log(hi))],
        }
    }
}

/// Signed clearance of a beam reading.
pub fn constraint_distance(z: f64, d_min: f64) -> f64 {
    z - d_min
}

/// `logistic(σ_c (z − d_min))`.
pub fn clearance_indicator(z: f64, d_min: f64, sigma_c: f64) -> f64 {
    smooth_indicator(constraint_distance(z, d_min), sigma_c)
}

/// `count` distinct beam indices out of `total`, uniformly at random.
pub fn subsample_beams(total: usize, count: usize, rng: &mut RandomStream) -> Result<Vec<usize>, ExploreError> {
    if count > total {
        return Err(ExploreError::Domain("more beams requested than available"));
    }
    let mut idx: Vec<usize> = (0..total).collect();
    for i in 0..count {
        let j = i + rng.below(total - i);
        idx.swap(i, j);
    }
    idx.truncate(count);
    Ok(idx)
}
