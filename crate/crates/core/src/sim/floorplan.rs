use alloc::string::String;
use alloc::vec::Vec;

use super::SimError;
use crate::explore::{trace_into, OccupancyGrid, Pose};

/// A floor plan in metres. `polygons` outline free space; their edges and
/// the optional `walls` polylines become one-cell-thick walls. Everything
/// outside every polygon is solid.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FloorPlan {
    pub id: String,
    pub polygons: Vec<Vec<[f64; 2]>>,
    pub walls: Vec<Vec<[f64; 2]>>,
    pub bbox_min: [f64; 2],
    pub bbox_max: [f64; 2],
    pub rooms: Option<usize>,
}

impl FloorPlan {
    /// Builds a plan with its bounding box computed from the polygons.
    pub fn new(id: String, polygons: Vec<Vec<[f64; 2]>>, walls: Vec<Vec<[f64; 2]>>, rooms: Option<usize>) -> Result<Self, SimError> {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in polygons.iter().flatten() {
            if !(v[0].is_finite() && v[1].is_finite()) {
                return Err(SimError::Geometry("non-finite vertex"));
            }
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        let plan = Self { id, polygons, walls, bbox_min: lo, bbox_max: hi, rooms };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.polygons.is_empty() {
            return Err(SimError::Geometry("floor plan has no polygons"));
        }
        for poly in &self.polygons {
            let mut distinct: Vec<[f64; 2]> = Vec::new();
            for v in poly {
                if !distinct.contains(v) {
                    distinct.push(*v);
                }
            }
            if distinct.len() < 3 {
                return Err(SimError::Geometry("polygon with fewer than 3 distinct vertices"));
            }
        }
        for v in self.polygons.iter().flatten() {
            for k in 0..2 {
                if v[k] < self.bbox_min[k] || v[k] > self.bbox_max[k] {
                    return Err(SimError::Geometry("bounding box does not contain all vertices"));
                }
            }
        }
        if self.walls.iter().flatten().any(|v| !(v[0].is_finite() && v[1].is_finite())) {
            return Err(SimError::Geometry("non-finite wall vertex"));
        }
        Ok(())
    }

    pub fn size(&self) -> [f64; 2] {
        [self.bbox_max[0] - self.bbox_min[0], self.bbox_max[1] - self.bbox_min[1]]
    }
}

/// Binary rasterized floor plan.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruthGrid {
    grid: OccupancyGrid,
    free_count: usize,
}

impl GroundTruthGrid {
    /// Wraps a grid of 0/1 cells, forcing the border to occupied.
    pub fn from_grid(mut grid: OccupancyGrid) -> Result<Self, SimError> {
        let (w, h) = (grid.width() as i64, grid.height() as i64);
        if w < 3 || h < 3 {
            return Err(SimError::Geometry("grid smaller than 3x3 cells"));
        }
        for ix in 0..w {
            grid.set(ix, 0, 1.0)?;
            grid.set(ix, h - 1, 1.0)?;
        }
        for iy in 0..h {
            grid.set(0, iy, 1.0)?;
            grid.set(w - 1, iy, 1.0)?;
        }
        let mut cells = grid.cells().to_vec();
        for c in &mut cells {
            *c = if *c >= 0.5 { 1.0 } else { 0.0 };
        }
        let grid = OccupancyGrid::from_cells(grid.width(), grid.height(), grid.resolution(), grid.origin(), cells)?;
        let free_count = grid.cells().iter().filter(|&&c| c == 0.0).count();
        Ok(Self { grid, free_count })
    }

    pub fn grid(&self) -> &OccupancyGrid {
        &self.grid
    }

    pub fn free_count(&self) -> usize {
        self.free_count
    }

    /// Free area in m².
    pub fn free_area(&self) -> f64 {
        self.free_count as f64 * self.grid.resolution() * self.grid.resolution()
    }

    /// Cells outside the grid count as occupied.
    pub fn is_occupied(&self, ix: i64, iy: i64) -> bool {
        self.grid.index(ix, iy).is_none_or(|i| self.grid.cells()[i] != 0.0)
    }

    pub fn is_free(&self, ix: i64, iy: i64) -> bool {
        !self.is_occupied(ix, iy)
    }
}

const SNAP: f64 = 1e-9;

fn cell_index(v: f64, origin: f64, res: f64, n: usize) -> i64 {
    let c = libm::floor((v - origin) / res + SNAP) as i64;
    c.clamp(0, n as i64 - 1)
}

fn point_in_polygon(x: f64, y: f64, poly: &[[f64; 2]]) -> bool {
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi) = (poly[i][0], poly[i][1]);
        let (xj, yj) = (poly[j][0], poly[j][1]);
        if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
            inside = !inside;
        }
        j = i;
    }
    inside
}

fn mark_segment(grid: &mut OccupancyGrid, a: [f64; 2], b: [f64; 2], buf: &mut Vec<crate::explore::RayCell>) -> Result<(), SimError> {
    let res = grid.resolution();
    let o = grid.origin();
    let (w, h) = (grid.width(), grid.height());
    let len = libm::hypot(b[0] - a[0], b[1] - a[1]);
    let start = Pose::new(a[0] + SNAP * res, a[1] + SNAP * res);
    if len == 0.0 {
        grid.set(cell_index(a[0], o.x, res, w), cell_index(a[1], o.y, res, h), 1.0)?;
        return Ok(());
    }
    let angle = libm::atan2(b[1] - a[1], b[0] - a[0]);
    trace_into(grid, start, angle, len + SNAP * res, buf);
    for c in buf.iter() {
        let ix = c.ix.clamp(0, w as i64 - 1);
        let iy = c.iy.clamp(0, h as i64 - 1);
        grid.set(ix, iy, 1.0)?;
    }
    Ok(())
}

/// True when segment `a`-`b` runs exactly along a grid line.
fn on_grid_line(a: [f64; 2], b: [f64; 2], origin: [f64; 2], res: f64) -> bool {
    (0..2).any(|k| {
        let t = (a[k] - origin[k]) / res;
        a[k] == b[k] && (t - libm::round(t)).abs() < 1e-6
    })
}

/// Rasterizes `plan` at `resolution` m/cell. The grid spans the bounding
/// box plus one cell on every side; a cell is free when its centre lies
/// inside a polygon and it is not covered by a wall. Polygon edges that run
/// along grid lines already separate inside from outside cells and are not
/// drawn, so free area does not shrink with coarser grids.
pub fn rasterize(plan: &FloorPlan, resolution: f64) -> Result<GroundTruthGrid, SimError> {
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(SimError::InvalidConfig("sim.resolution"));
    }
    plan.validate()?;
    let size = plan.size();
    let w = libm::ceil(size[0] / resolution - SNAP).max(1.0) as usize;
    let h = libm::ceil(size[1] / resolution - SNAP).max(1.0) as usize;
    if w < 3 || h < 3 {
        return Err(SimError::Geometry("grid smaller than 3x3 cells"));
    }
    let (w, h) = (w + 2, h + 2);
    let origin = Pose::new(plan.bbox_min[0] - resolution, plan.bbox_min[1] - resolution);
    let mut grid = OccupancyGrid::new(w, h, resolution, origin, 1.0)?;
    for iy in 0..h as i64 {
        for ix in 0..w as i64 {
            let c = grid.cell_center(ix, iy);
            if plan.polygons.iter().any(|p| point_in_polygon(c.x, c.y, p)) {
                grid.set(ix, iy, 0.0)?;
            }
        }
    }
    let mut buf = Vec::new();
    for poly in &plan.polygons {
        for k in 0..poly.len() {
            let (a, b) = (poly[k], poly[(k + 1) % poly.len()]);
            if !on_grid_line(a, b, [origin.x, origin.y], resolution) {
                mark_segment(&mut grid, a, b, &mut buf)?;
            }
        }
    }
    for line in &plan.walls {
        for pair in line.windows(2) {
            mark_segment(&mut grid, pair[0], pair[1], &mut buf)?;
        }
        if line.len() == 1 {
            mark_segment(&mut grid, line[0], line[0], &mut buf)?;
        }
    }
    GroundTruthGrid::from_grid(grid)
}
