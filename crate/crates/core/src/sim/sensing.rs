use alloc::vec::Vec;

use super::{GroundTruthGrid, SimError};
use crate::explore::{trace_into, LidarModel, OccupancyGrid, Pose, RayCell, P_FREE, P_OCCUPIED, P_UNKNOWN};
use crate::prob::RandomStream;

/// Distance to the first occupied truth cell along a beam, or `max_range`.
pub fn true_range(truth: &GroundTruthGrid, pose: Pose, angle: f64, max_range: f64, buf: &mut Vec<RayCell>) -> f64 {
    trace_into(truth.grid(), pose, angle, max_range, buf);
    buf.iter()
        .find(|c| truth.is_occupied(c.ix, c.iy))
        .map_or(max_range, |c| c.entry)
}

/// One noisy range per beam. A zero `sigma_hit` gives exact ranges.
pub fn simulate_scan(truth: &GroundTruthGrid, pose: Pose, lidar: &LidarModel, rng: &mut RandomStream) -> Result<Vec<f64>, SimError> {
    let (ix, iy) = truth.grid().cell_of(pose.x, pose.y);
    if !pose.x.is_finite() || !pose.y.is_finite() || truth.is_occupied(ix, iy) {
        return Err(SimError::InvalidPose { x: pose.x, y: pose.y });
    }
    let mut buf = Vec::new();
    let zmax = lidar.max_range;
    let mut ranges = Vec::with_capacity(lidar.beam_count);
    for i in 0..lidar.beam_count {
        let d = true_range(truth, pose, lidar.beam_angle(i), zmax, &mut buf);
        let z = if d >= zmax {
            zmax
        } else if lidar.sigma_hit > 0.0 {
            (d + lidar.sigma_hit * rng.standard_normal()).clamp(0.0, zmax)
        } else {
            d
        };
        ranges.push(z);
    }
    Ok(ranges)
}

/// Writes one scan into the known map: traversed cells before the endpoint
/// become free, the endpoint cell occupied unless the range is maximal. The
/// cell under the robot is always written free.
pub fn update_known_map(known: &mut OccupancyGrid, pose: Pose, ranges: &[f64], lidar: &LidarModel) -> Result<(), SimError> {
    if ranges.len() != lidar.beam_count {
        return Err(SimError::ScanLength { expected: lidar.beam_count, got: ranges.len() });
    }
    let zmax = lidar.max_range;
    let slack = 1e-9 * known.resolution();
    let mut buf = Vec::new();
    for (i, &z) in ranges.iter().enumerate() {
        if !(0.0..=zmax).contains(&z) {
            return Err(SimError::Explore(crate::explore::ExploreError::Domain("range outside [0, max range]")));
        }
        let angle = lidar.beam_angle(i);
        if z >= zmax {
            trace_into(known, pose, angle, zmax, &mut buf);
            for c in &buf {
                known.set(c.ix, c.iy, P_FREE)?;
            }
        } else {
            trace_into(known, pose, angle, z + slack, &mut buf);
            let n = buf.len();
            for (k, c) in buf.iter().enumerate() {
                let p = if k + 1 == n && k > 0 { P_OCCUPIED } else { P_FREE };
                known.set(c.ix, c.iy, p)?;
            }
        }
    }
    let (ix, iy) = known.cell_of(pose.x, pose.y);
    known.set(ix, iy, P_FREE)?;
    Ok(())
}

/// Number of truth-free cells the known map has written.
pub fn explored_cells(known: &OccupancyGrid, truth: &GroundTruthGrid) -> Result<usize, SimError> {
    if !known.same_geometry(truth.grid()) {
        return Err(SimError::Alignment);
    }
    Ok(known
        .cells()
        .iter()
        .zip(truth.grid().cells())
        .filter(|(k, t)| **t == 0.0 && **k != P_UNKNOWN)
        .count())
}

/// Fraction of truth-free cells that are no longer unknown.
pub fn measure_ratio(known: &OccupancyGrid, truth: &GroundTruthGrid) -> Result<f64, SimError> {
    let explored = explored_cells(known, truth)?;
    if truth.free_count() == 0 {
        return Ok(0.0);
    }
    Ok((explored as f64 / truth.free_count() as f64).clamp(0.0, 1.0))
}
