use alloc::vec::Vec;

use super::{GroundTruthGrid, SimError};
use crate::explore::Pose;
use crate::prob::RandomStream;

/// Result of one commanded motion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MotionOutcome {
    pub pose: Pose,
    /// Fraction of the displacement actually travelled.
    pub travelled: f64,
    /// Point of first contact when the motion was truncated.
    pub contact: Option<Pose>,
}

fn distance_to_cell(truth: &GroundTruthGrid, p: Pose, ix: i64, iy: i64) -> f64 {
    let g = truth.grid();
    let res = g.resolution();
    let x0 = g.origin().x + ix as f64 * res;
    let y0 = g.origin().y + iy as f64 * res;
    let dx = (x0 - p.x).max(0.0).max(p.x - (x0 + res));
    let dy = (y0 - p.y).max(0.0).max(p.y - (y0 + res));
    libm::hypot(dx, dy)
}

/// Distance from `p` to the nearest occupied truth cell, searched within
/// `horizon` metres; returns `horizon` when none is closer.
pub fn clearance(truth: &GroundTruthGrid, p: Pose, horizon: f64) -> f64 {
    let g = truth.grid();
    let (lo_x, lo_y) = g.cell_of(p.x - horizon, p.y - horizon);
    let (hi_x, hi_y) = g.cell_of(p.x + horizon, p.y + horizon);
    let mut best = horizon;
    for iy in lo_y..=hi_y {
        for ix in lo_x..=hi_x {
            if truth.is_occupied(ix, iy) {
                best = best.min(distance_to_cell(truth, p, ix, iy));
            }
        }
    }
    best
}

/// First parameter in `[0, 1]` at which a disc of `radius` moving from `p`
/// by `d` touches cell `(ix, iy)`, if any. The distance along the segment
/// is convex, so its minimum is located by ternary search and the first
/// crossing by bisection.
fn first_contact(truth: &GroundTruthGrid, p: Pose, d: [f64; 2], radius: f64, ix: i64, iy: i64) -> Option<f64> {
    let f = |s: f64| distance_to_cell(truth, Pose::new(p.x + s * d[0], p.y + s * d[1]), ix, iy) - radius;
    let f0 = f(0.0);
    if f0 <= 0.0 {
        // already touching: only motion that closes in counts
        return if f(1e-6) < f0 { Some(0.0) } else { None };
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let a = lo + (hi - lo) / 3.0;
        let b = hi - (hi - lo) / 3.0;
        if f(a) <= f(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let s_min = 0.5 * (lo + hi);
    if f(s_min) > 0.0 {
        return None;
    }
    let (mut a, mut b) = (0.0, s_min);
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        if f(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Some(a)
}

/// Moves a disc of `radius` from `pose` by `displacement`. On contact with
/// an occupied truth cell the disc stops `backoff` metres before the first
/// touching point.
pub fn apply_motion(truth: &GroundTruthGrid, pose: Pose, displacement: [f64; 2], radius: f64, backoff: f64) -> Result<MotionOutcome, SimError> {
    if !displacement.iter().all(|v| v.is_finite()) {
        return Err(SimError::InvalidConfig("displacement must be finite"));
    }
    let len = libm::hypot(displacement[0], displacement[1]);
    if len == 0.0 {
        return Ok(MotionOutcome { pose, travelled: 0.0, contact: None });
    }
    let g = truth.grid();
    let reach = radius + g.resolution();
    let end = pose.offset(displacement);
    let (lo_x, lo_y) = g.cell_of(pose.x.min(end.x) - reach, pose.y.min(end.y) - reach);
    let (hi_x, hi_y) = g.cell_of(pose.x.max(end.x) + reach, pose.y.max(end.y) + reach);
    let mut hit: Option<f64> = None;
    for iy in lo_y..=hi_y {
        for ix in lo_x..=hi_x {
            if truth.is_occupied(ix, iy) {
                if let Some(s) = first_contact(truth, pose, displacement, radius, ix, iy) {
                    hit = Some(hit.map_or(s, |h: f64| h.min(s)));
                }
            }
        }
    }
    match hit {
        None => Ok(MotionOutcome { pose: end, travelled: 1.0, contact: None }),
        Some(s) => {
            let stop = (s - backoff / len).max(0.0);
            Ok(MotionOutcome {
                pose: Pose::new(pose.x + stop * displacement[0], pose.y + stop * displacement[1]),
                travelled: stop,
                contact: Some(Pose::new(pose.x + s * displacement[0], pose.y + s * displacement[1])),
            })
        }
    }
}

/// Uniform draw over free cell centres with at least `min_clearance` to
/// the nearest occupied cell.
pub fn choose_start(truth: &GroundTruthGrid, min_clearance: f64, rng: &mut RandomStream) -> Result<Pose, SimError> {
    let g = truth.grid();
    let mut candidates = Vec::new();
    for iy in 0..g.height() as i64 {
        for ix in 0..g.width() as i64 {
            if truth.is_free(ix, iy) {
                let c = g.cell_center(ix, iy);
                if clearance(truth, c, min_clearance + g.resolution()) >= min_clearance {
                    candidates.push(c);
                }
            }
        }
    }
    if candidates.is_empty() {
        return Err(SimError::NoStart);
    }
    Ok(candidates[rng.below(candidates.len())])
}
