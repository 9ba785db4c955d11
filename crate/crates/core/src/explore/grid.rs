use alloc::vec;
use alloc::vec::Vec;

use super::{ExploreError, Pose};

pub const P_FREE: f64 = 0.05;
pub const P_OCCUPIED: f64 = 0.95;
pub const P_UNKNOWN: f64 = 0.5;

/// Row-major grid of occupancy probabilities. Cell `(ix, iy)` covers
/// `[origin.x + ix·res, origin.x + (ix+1)·res) × [origin.y + iy·res, …)`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OccupancyGrid {
    width: usize,
    height: usize,
    resolution: f64,
    origin: Pose,
    cells: Vec<f64>,
}

impl OccupancyGrid {
    pub fn new(width: usize, height: usize, resolution: f64, origin: Pose, fill: f64) -> Result<Self, ExploreError> {
        if width == 0 || height == 0 {
            return Err(ExploreError::InvalidGrid("dimensions must be at least 1"));
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(ExploreError::InvalidGrid("resolution must be positive"));
        }
        if !(0.0..=1.0).contains(&fill) {
            return Err(ExploreError::InvalidGrid("probabilities must lie in [0, 1]"));
        }
        Ok(Self { width, height, resolution, origin, cells: vec![fill; width * height] })
    }

    /// Grid of unknown cells.
    pub fn unknown(width: usize, height: usize, resolution: f64, origin: Pose) -> Result<Self, ExploreError> {
        Self::new(width, height, resolution, origin, P_UNKNOWN)
    }

    pub fn from_cells(width: usize, height: usize, resolution: f64, origin: Pose, cells: Vec<f64>) -> Result<Self, ExploreError> {
        let mut g = Self::new(width, height, resolution, origin, P_UNKNOWN)?;
        if cells.len() != width * height {
            return Err(ExploreError::InvalidGrid("cell count does not match dimensions"));
        }
        if cells.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(ExploreError::InvalidGrid("probabilities must lie in [0, 1]"));
        }
        g.cells = cells;
        Ok(g)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn origin(&self) -> Pose {
        self.origin
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn same_geometry(&self, other: &OccupancyGrid) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.resolution == other.resolution
            && self.origin == other.origin
    }

    pub fn contains_cell(&self, ix: i64, iy: i64) -> bool {
        ix >= 0 && iy >= 0 && (ix as u64) < self.width as u64 && (iy as u64) < self.height as u64
    }

    pub fn index(&self, ix: i64, iy: i64) -> Option<usize> {
        self.contains_cell(ix, iy).then(|| iy as usize * self.width + ix as usize)
    }

    /// Occupancy probability; cells outside the grid are unknown.
    pub fn probability(&self, ix: i64, iy: i64) -> f64 {
        self.index(ix, iy).map_or(P_UNKNOWN, |i| self.cells[i])
    }

    pub fn get(&self, ix: usize, iy: usize) -> Option<f64> {
        self.index(ix as i64, iy as i64).map(|i| self.cells[i])
    }

    /// Writes a probability; writes outside the grid are ignored.
    pub fn set(&mut self, ix: i64, iy: i64, p: f64) -> Result<(), ExploreError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(ExploreError::InvalidGrid("probabilities must lie in [0, 1]"));
        }
        if let Some(i) = self.index(ix, iy) {
            self.cells[i] = p;
        }
        Ok(())
    }

    /// Continuous cell coordinates of a world point.
    pub fn to_cell_coords(&self, x: f64, y: f64) -> (f64, f64) {
        ((x - self.origin.x) / self.resolution, (y - self.origin.y) / self.resolution)
    }

    pub fn cell_of(&self, x: f64, y: f64) -> (i64, i64) {
        let (cx, cy) = self.to_cell_coords(x, y);
        (libm::floor(cx) as i64, libm::floor(cy) as i64)
    }

    pub fn cell_center(&self, ix: i64, iy: i64) -> Pose {
        Pose::new(
            self.origin.x + (ix as f64 + 0.5) * self.resolution,
            self.origin.y + (iy as f64 + 0.5) * self.resolution,
        )
    }

    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        let (ix, iy) = self.cell_of(x, y);
        x.is_finite() && y.is_finite() && self.contains_cell(ix, iy)
    }

    /// World extent `(width_m, height_m)`.
    pub fn extent(&self) -> (f64, f64) {
        (self.width as f64 * self.resolution, self.height as f64 * self.resolution)
    }
}
