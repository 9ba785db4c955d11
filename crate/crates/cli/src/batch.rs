use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use explore_core::sim::{run_episode, EpisodeConfig, EpisodeReport};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::maps::MapEntry;

pub const CSV_HEADER: &str = "map_id,area_m2,rooms,steps,explored_ratio,explored_m2,collisions,termination,seed,wall_time_s";

/// Seed of map `id` under master seed `master`: the first eight bytes of
/// SHA-256 over both, so it does not depend on batch order.
pub fn map_seed(master: u64, id: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(id.as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

/// One CSV line. Failed episodes keep their id and seed and report
/// `termination = error` with the numeric columns left empty.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsRow {
    pub map_id: String,
    pub area_m2: Option<f64>,
    pub rooms: Option<usize>,
    pub steps: Option<usize>,
    pub explored_ratio: Option<f64>,
    pub explored_m2: Option<f64>,
    pub collisions: Option<usize>,
    pub termination: String,
    pub seed: u64,
    pub wall_time_s: f64,
    pub error: Option<String>,
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl MetricsRow {
    pub fn from_report(r: &EpisodeReport) -> Self {
        Self {
            map_id: r.map_id.clone(),
            area_m2: Some(r.area_m2),
            rooms: r.rooms,
            steps: Some(r.steps),
            explored_ratio: Some(r.explored_ratio),
            explored_m2: Some(r.explored_m2),
            collisions: Some(r.collisions),
            termination: r.termination.as_str().to_string(),
            seed: r.seed,
            wall_time_s: r.wall_time_s,
            error: None,
        }
    }

    pub fn failed(map_id: &str, seed: u64, error: String) -> Self {
        Self {
            map_id: map_id.to_string(),
            area_m2: None,
            rooms: None,
            steps: None,
            explored_ratio: None,
            explored_m2: None,
            collisions: None,
            termination: "error".into(),
            seed,
            wall_time_s: 0.0,
            error: Some(error),
        }
    }

    /// Every column except the wall time, which differs between runs.
    pub fn deterministic_fields(&self) -> String {
        [
            csv_field(&self.map_id),
            opt(&self.area_m2),
            opt(&self.rooms),
            opt(&self.steps),
            opt(&self.explored_ratio),
            opt(&self.explored_m2),
            opt(&self.collisions),
            self.termination.clone(),
            self.seed.to_string(),
        ]
        .join(",")
    }

    pub fn to_csv(&self) -> String {
        format!("{},{:.3}", self.deterministic_fields(), self.wall_time_s)
    }
}

/// Header plus one line per row, newline terminated.
pub fn to_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}

/// Runs one episode and stamps its wall time.
pub fn run_timed(plan: &explore_core::sim::FloorPlan, cfg: &EpisodeConfig, seed: u64) -> Result<EpisodeReport, String> {
    let t0 = Instant::now();
    let mut report = run_episode(plan, cfg, seed).map_err(|e| e.to_string())?;
    report.wall_time_s = t0.elapsed().as_secs_f64();
    Ok(report)
}

#[derive(Debug)]
pub struct BatchOutcome {
    /// Sorted by area, failed maps last, ties by id.
    pub rows: Vec<MetricsRow>,
    /// Reports aligned with `rows`; `None` for failed maps.
    pub reports: Vec<Option<EpisodeReport>>,
    pub summary: Summary,
}

/// One episode per map on `parallel` worker threads. Results are collected
/// and ordered after every worker is done, so the output does not depend
/// on scheduling.
pub fn run_batch(maps: &[MapEntry], cfg: &EpisodeConfig, master_seed: u64, parallel: usize) -> BatchOutcome {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<(MetricsRow, Option<EpisodeReport>)>>> = Mutex::new(vec![None; maps.len()]);
    std::thread::scope(|s| {
        for _ in 0..parallel.clamp(1, maps.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(entry) = maps.get(i) else { break };
                let seed = map_seed(master_seed, &entry.id);
                let result = match &entry.plan {
                    Ok(plan) => match run_timed(plan, cfg, seed) {
                        Ok(r) => (MetricsRow::from_report(&r), Some(r)),
                        Err(e) => (MetricsRow::failed(&entry.id, seed, e), None),
                    },
                    Err(e) => (MetricsRow::failed(&entry.id, seed, e.clone()), None),
                };
                slots.lock().expect("no worker panics while holding the lock")[i] = Some(result);
            });
        }
    });
    let mut done: Vec<(MetricsRow, Option<EpisodeReport>)> =
        slots.into_inner().expect("workers joined").into_iter().map(|s| s.expect("every map ran")).collect();
    done.sort_by(|a, b| {
        let key = |r: &MetricsRow| r.area_m2.unwrap_or(f64::INFINITY);
        key(&a.0).total_cmp(&key(&b.0)).then_with(|| a.0.map_id.cmp(&b.0.map_id))
    });
    let (rows, reports): (Vec<_>, Vec<_>) = done.into_iter().unzip();
    let summary = summarize(&rows, &reports);
    BatchOutcome { rows, reports, summary }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoomGroup {
    /// `null` for maps without a room count.
    pub rooms: Option<usize>,
    pub episodes: usize,
    pub mean_explored_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MapCollisions {
    pub map_id: String,
    pub points: Vec<[f64; 2]>,
}

/// Aggregates over successful episodes, taken in CSV row order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub episodes: usize,
    pub failed: usize,
    pub mean_explored_ratio: Option<f64>,
    pub median_explored_ratio: Option<f64>,
    pub total_steps: usize,
    pub total_collisions: usize,
    pub collisions_per_1000_steps: Option<f64>,
    pub by_rooms: Vec<RoomGroup>,
    pub collision_points: Vec<MapCollisions>,
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

pub fn summarize(rows: &[MetricsRow], reports: &[Option<EpisodeReport>]) -> Summary {
    let ok: Vec<&MetricsRow> = rows.iter().filter(|r| r.error.is_none()).collect();
    let ratios: Vec<f64> = ok.iter().filter_map(|r| r.explored_ratio).collect();
    let total_steps: usize = ok.iter().filter_map(|r| r.steps).sum();
    let total_collisions: usize = ok.iter().filter_map(|r| r.collisions).sum();
    let mut room_keys: Vec<Option<usize>> = ok.iter().map(|r| r.rooms).collect();
    room_keys.sort();
    room_keys.dedup();
    let by_rooms = room_keys
        .into_iter()
        .map(|k| {
            let group: Vec<f64> = ok.iter().filter(|r| r.rooms == k).filter_map(|r| r.explored_ratio).collect();
            RoomGroup { rooms: k, episodes: group.len(), mean_explored_ratio: mean(&group).unwrap_or(0.0) }
        })
        .collect();
    let collision_points = reports
        .iter()
        .flatten()
        .filter(|r| !r.collision_points.is_empty())
        .map(|r| MapCollisions { map_id: r.map_id.clone(), points: r.collision_points.iter().map(|p| [p.x, p.y]).collect() })
        .collect();
    Summary {
        episodes: ok.len(),
        failed: rows.len() - ok.len(),
        mean_explored_ratio: mean(&ratios),
        median_explored_ratio: median(&ratios),
        total_steps,
        total_collisions,
        collisions_per_1000_steps: (total_steps > 0).then(|| 1000.0 * total_collisions as f64 / total_steps as f64),
        by_rooms,
        collision_points,
    }
}
