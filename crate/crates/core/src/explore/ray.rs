use alloc::vec::Vec;

use super::{ExploreError, OccupancyGrid, Pose};
use crate::prob::RandomStream;

/// A traversed cell and the distance (m) at which the ray enters it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RayCell {
    pub ix: i64,
    pub iy: i64,
    pub entry: f64,
}

/// Cells crossed by the ray from `pose` at `angle` whose entry distance is
/// below `max_range`. The start cell comes first with entry distance 0.
/// Fails when the pose is outside the grid.
pub fn ray_trace(grid: &OccupancyGrid, pose: Pose, angle: f64, max_range: f64) -> Result<Vec<RayCell>, ExploreError> {
    if !grid.contains_point(pose.x, pose.y) {
        return Err(ExploreError::OutOfBounds { x: pose.x, y: pose.y });
    }
    let mut out = Vec::new();
    trace_into(grid, pose, angle, max_range, &mut out);
    Ok(out)
}

/// Grid traversal without the bounds check; coordinates beyond the grid
/// are reported as-is.
pub(crate) fn trace_into(grid: &OccupancyGrid, pose: Pose, angle: f64, max_range: f64, out: &mut Vec<RayCell>) {
    out.clear();
    let res = grid.resolution();
    let (px, py) = grid.to_cell_coords(pose.x, pose.y);
    let mut ix = libm::floor(px) as i64;
    let mut iy = libm::floor(py) as i64;
    let mut dx = libm::cos(angle);
    let mut dy = libm::sin(angle);
    if dx.abs() < 1e-12 {
        dx = 0.0;
    }
    if dy.abs() < 1e-12 {
        dy = 0.0;
    }
    let (step_x, mut t_x, delta_x) = axis_setup(px, ix, dx, res);
    let (step_y, mut t_y, delta_y) = axis_setup(py, iy, dy, res);
    let tie = 1e-12 * res;
    if max_range > 0.0 {
        out.push(RayCell { ix, iy, entry: 0.0 });
    }
    loop {
        let t;
        if t_x + tie < t_y {
            t = t_x;
            ix += step_x;
            t_x += delta_x;
        } else if t_y + tie < t_x {
            t = t_y;
            iy += step_y;
            t_y += delta_y;
        } else {
            // exact corner: the ray touches the diagonal cell only at a point
            t = t_x.min(t_y);
            ix += step_x;
            iy += step_y;
            t_x += delta_x;
            t_y += delta_y;
        }
        if !(t < max_range) {
            break;
        }
        out.push(RayCell { ix, iy, entry: t });
    }
}

fn axis_setup(p: f64, i: i64, d: f64, res: f64) -> (i64, f64, f64) {
    if d > 0.0 {
        (1, ((i as f64 + 1.0) - p) * res / d, res / d)
    } else if d < 0.0 {
        (-1, (p - i as f64) * res / -d, res / -d)
    } else {
        (0, f64::INFINITY, f64::INFINITY)
    }
}

/// Independent Bernoulli draw per traversed cell and the entry distance of
/// the first occupied one past the start cell, or `max_range` when none is.
/// The start cell holds the sensor, so it never blocks the beam.
pub fn sample_ray_map(grid: &OccupancyGrid, cells: &[RayCell], max_range: f64, rng: &mut RandomStream) -> (Vec<bool>, f64) {
    let mut draws = Vec::with_capacity(cells.len());
    let mut d_true = max_range;
    for c in cells {
        let occ = rng.uniform() < grid.probability(c.ix, c.iy);
        if occ && d_true == max_range && c.entry > 0.0 {
            d_true = c.entry;
        }
        draws.push(occ);
    }
    (draws, d_true)
}

/// Distribution of the first-hit distance along a traced ray. Drawing from
/// it matches the `d_true` marginal of [`sample_ray_map`] with a single
/// uniform per draw.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HitProfile {
    distances: Vec<f64>,
    cumulative: Vec<f64>,
    max_range: f64,
}

impl HitProfile {
    pub fn new(grid: &OccupancyGrid, cells: &[RayCell], max_range: f64) -> Self {
        let mut p = Self::default();
        p.rebuild(grid, cells, max_range);
        p
    }

    pub(crate) fn rebuild(&mut self, grid: &OccupancyGrid, cells: &[RayCell], max_range: f64) {
        self.distances.clear();
        self.cumulative.clear();
        self.max_range = max_range;
        let mut survive = 1.0;
        let mut acc = 0.0;
        for c in cells {
            let p = grid.probability(c.ix, c.iy);
            // the robot's own cell cannot block its beam
            if p <= 0.0 || c.entry <= 0.0 {
                continue;
            }
            acc += survive * p;
            survive *= 1.0 - p;
            self.distances.push(c.entry);
            self.cumulative.push(acc);
            if survive <= 0.0 {
                break;
            }
        }
    }

    /// Probability that the ray is blocked before `max_range`.
    pub fn hit_probability(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    pub fn sample(&self, rng: &mut RandomStream) -> f64 {
        let u = rng.uniform();
        let k = self.cumulative.partition_point(|&c| c <= u);
        self.distances.get(k).copied().unwrap_or(self.max_range)
    }

    /// Expected first-hit distance.
    pub fn mean(&self) -> f64 {
        let mut prev = 0.0;
        let mut m = 0.0;
        for (d, c) in self.distances.iter().zip(&self.cumulative) {
            m += d * (c - prev);
            prev = *c;
        }
        m + self.max_range * (1.0 - prev)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explore::{P_FREE, P_UNKNOWN};
    use approx::assert_relative_eq;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn unit_grid() -> OccupancyGrid {
        OccupancyGrid::new(10, 10, 1.0, Pose::new(0.0, 0.0), 0.0).unwrap()
    }

    #[test]
    fn axis_aligned_entries() {
        let g = unit_grid();
        let cells = ray_trace(&g, Pose::new(0.5, 0.5), 0.0, 4.0).unwrap();
        let got: Vec<(i64, i64, f64)> = cells.iter().map(|c| (c.ix, c.iy, c.entry)).collect();
        assert_eq!(got, alloc::vec![(0, 0, 0.0), (1, 0, 0.5), (2, 0, 1.5), (3, 0, 2.5), (4, 0, 3.5)]);
        let up = ray_trace(&g, Pose::new(0.5, 0.5), FRAC_PI_2, 4.0).unwrap();
        for (a, b) in cells.iter().zip(&up) {
            assert_eq!((b.ix, b.iy), (0, a.ix));
            assert_relative_eq!(a.entry, b.entry, epsilon = 1e-12);
        }
    }

    #[test]
    fn truncation_at_max_range() {
        let g = unit_grid();
        assert_eq!(ray_trace(&g, Pose::new(0.5, 0.5), 0.0, 2.2).unwrap().len(), 3);
    }

    #[test]
    fn diagonal_through_corners() {
        let g = unit_grid();
        let cells = ray_trace(&g, Pose::new(0.5, 0.5), FRAC_PI_4, 3.0).unwrap();
        assert_eq!((cells[1].ix, cells[1].iy), (1, 1));
        assert_relative_eq!(cells[1].entry, core::f64::consts::SQRT_2 / 2.0, epsilon = 1e-12);
        assert_eq!((cells[2].ix, cells[2].iy), (2, 2));
    }

    #[test]
    fn leaves_grid_and_continues() {
        let g = unit_grid();
        let cells = ray_trace(&g, Pose::new(0.5, 0.5), PI, 3.0).unwrap();
        assert_eq!((cells[1].ix, cells[1].iy), (-1, 0));
        assert_eq!(cells.len(), 4);
    }

    #[test]
    fn pose_outside_is_rejected() {
        let g = unit_grid();
        assert!(matches!(ray_trace(&g, Pose::new(-0.1, 0.5), 0.0, 3.0), Err(ExploreError::OutOfBounds { .. })));
    }

    #[test]
    fn sample_ray_map_examples() {
        let mut g = unit_grid();
        let mut rng = RandomStream::new(1, 0);
        let cells = ray_trace(&g, Pose::new(0.5, 0.5), 0.0, 4.0).unwrap();
        assert_eq!(sample_ray_map(&g, &cells, 4.0, &mut rng).1, 4.0);
        g.set(1, 0, 1.0).unwrap();
        let (draws, d) = sample_ray_map(&g, &cells, 4.0, &mut rng);
        assert!(!draws[0] && draws[1]);
        assert_eq!(d, 0.5);
    }

    #[test]
    fn half_occupied_cell_expectation() {
        let mut g = unit_grid();
        g.set(1, 0, 0.5).unwrap();
        let cells = ray_trace(&g, Pose::new(0.5, 0.5), 0.0, 2.0).unwrap();
        let mut rng = RandomStream::new(2, 0);
        let n = 10_000;
        let direct: f64 = (0..n).map(|_| sample_ray_map(&g, &cells, 2.0, &mut rng).1).sum::<f64>() / n as f64;
        assert!((direct - 1.25).abs() < 0.03);
        let profile = HitProfile::new(&g, &cells, 2.0);
        assert_relative_eq!(profile.mean(), 1.25, epsilon = 1e-12);
        let fast: f64 = (0..n).map(|_| profile.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((fast - 1.25).abs() < 0.03);
    }

    #[test]
    fn profile_matches_cellwise_sampler() {
        let mut g = OccupancyGrid::new(20, 3, 0.2, Pose::default(), P_FREE).unwrap();
        for ix in 8..20 {
            g.set(ix, 1, P_UNKNOWN).unwrap();
        }
        let cells = ray_trace(&g, Pose::new(0.1, 0.3), 0.0, 4.0).unwrap();
        let profile = HitProfile::new(&g, &cells, 4.0);
        let mut rng = RandomStream::new(3, 0);
        let n = 40_000;
        let a: f64 = (0..n).map(|_| sample_ray_map(&g, &cells, 4.0, &mut rng).1).sum::<f64>() / n as f64;
        assert!((a - profile.mean()).abs() < 0.02, "{a} vs {}", profile.mean());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(10_000))]
        #[test]
        fn entries_strictly_increase(x in 0.0..10.0f64, y in 0.0..10.0f64, angle in -7.0..7.0f64) {
            let g = unit_grid();
            let cells = ray_trace(&g, Pose::new(x, y), angle, 6.0).unwrap();
            for w in cells.windows(2) {
                proptest::prop_assert!(w[1].entry > w[0].entry);
            }
            proptest::prop_assert_eq!((cells[0].ix, cells[0].iy), g.cell_of(x, y));
            let mut seen: Vec<(i64, i64)> = cells.iter().map(|c| (c.ix, c.iy)).collect();
            seen.sort_unstable();
            let before = seen.len();
            seen.dedup();
            proptest::prop_assert_eq!(before, seen.len());
        }
    }
}
