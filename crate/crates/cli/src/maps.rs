//! Floor-plan files and the bundled map suite.
//!
//! Native files hold `{"id", "scale_m_per_unit", "rooms", "polygons", "walls"}`.
//! HouseExpo files hold one outline in `verts` plus `room_num` and `bbox`.
//! A `scale_m_per_unit` in the file and the configured scale multiply.

use std::path::{Path, PathBuf};

use explore_core::sim::FloorPlan;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MapFormat {
    /// HouseExpo when the file has `verts`, native otherwise.
    #[default]
    Auto,
    Native,
    #[value(name = "houseexpo")]
    #[serde(rename = "houseexpo")]
    HouseExpo,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NativeFile {
    id: Option<String>,
    scale_m_per_unit: Option<f64>,
    rooms: Option<usize>,
    polygons: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    walls: Vec<Vec<[f64; 2]>>,
}

#[derive(Deserialize)]
struct Bbox {
    min: [f64; 2],
    max: [f64; 2],
}

#[derive(Deserialize)]
struct HouseExpoFile {
    id: Option<String>,
    scale_m_per_unit: Option<f64>,
    room_num: Option<usize>,
    bbox: Option<Bbox>,
    verts: Vec<[f64; 2]>,
}

fn file_scale(declared: Option<f64>, scale: f64) -> Result<f64, String> {
    match declared {
        Some(s) if !(s > 0.0 && s.is_finite()) => Err(format!("scale_m_per_unit must be positive, got {s}")),
        Some(s) => Ok(s * scale),
        None => Ok(scale),
    }
}

fn scaled(lines: Vec<Vec<[f64; 2]>>, scale: f64) -> Vec<Vec<[f64; 2]>> {
    lines.into_iter().map(|l| l.into_iter().map(|[x, y]| [x * scale, y * scale]).collect()).collect()
}

/// Parses a map. `fallback_id` names maps whose file has no id.
pub fn parse_map(text: &str, fallback_id: &str, format: MapFormat, scale: f64) -> Result<FloorPlan, String> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let format = match format {
        MapFormat::Auto if value.get("verts").is_some() => MapFormat::HouseExpo,
        MapFormat::Auto => MapFormat::Native,
        f => f,
    };
    let plan = match format {
        MapFormat::HouseExpo => {
            let f: HouseExpoFile = serde_json::from_value(value).map_err(|e| e.to_string())?;
            let scale = file_scale(f.scale_m_per_unit, scale)?;
            let mut plan = FloorPlan::new(
                f.id.unwrap_or_else(|| fallback_id.to_string()),
                scaled(vec![f.verts], scale),
                Vec::new(),
                f.room_num,
            )
            .map_err(|e| e.to_string())?;
            // the declared box may be looser than the outline
            if let Some(b) = f.bbox {
                for k in 0..2 {
                    plan.bbox_min[k] = plan.bbox_min[k].min(b.min[k] * scale);
                    plan.bbox_max[k] = plan.bbox_max[k].max(b.max[k] * scale);
                }
            }
            plan
        }
        _ => {
            let f: NativeFile = serde_json::from_value(value).map_err(|e| e.to_string())?;
            let scale = file_scale(f.scale_m_per_unit, scale)?;
            FloorPlan::new(
                f.id.unwrap_or_else(|| fallback_id.to_string()),
                scaled(f.polygons, scale),
                scaled(f.walls, scale),
                f.rooms,
            )
            .map_err(|e| e.to_string())?
        }
    };
    Ok(plan)
}

fn file_id(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "map".into())
}

/// Loads one map file; any failure is a configuration error naming the path.
pub fn load_map(path: &Path, format: MapFormat, scale: f64) -> Result<FloorPlan, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read map {}: {e}", path.display())))?;
    parse_map(&text, &file_id(path), format, scale).map_err(|e| CliError::Config(format!("map {}: {e}", path.display())))
}

/// A batch input: the map, or why it failed to load.
#[derive(Clone, Debug)]
pub struct MapEntry {
    pub id: String,
    pub plan: Result<FloorPlan, String>,
}

/// Loads every `*.json` file of `dir`, in file-name order. Unparsable files
/// become failed entries.
pub fn load_dir(dir: &Path, format: MapFormat, scale: f64) -> Result<Vec<MapEntry>, CliError> {
    let read = std::fs::read_dir(dir).map_err(|e| CliError::Config(format!("cannot read maps directory {}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = read
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Config(format!("maps directory {} has no .json maps", dir.display())));
    }
    Ok(paths.iter().map(|p| load_entry(p, format, scale)).collect())
}

pub fn load_entry(path: &Path, format: MapFormat, scale: f64) -> MapEntry {
    let id = file_id(path);
    let plan = std::fs::read_to_string(path)
        .map_err(|e| e.to_string())
        .and_then(|text| parse_map(&text, &id, format, scale));
    MapEntry { id: plan.as_ref().map(|p| p.id.clone()).unwrap_or(id), plan }
}

const BUNDLED: [(&str, &str); 8] = [
    ("room_4x4", include_str!("../maps/room_4x4.json")),
    ("room_8x8", include_str!("../maps/room_8x8.json")),
    ("hall_10x5", include_str!("../maps/hall_10x5.json")),
    ("two_rooms_door", include_str!("../maps/two_rooms_door.json")),
    ("two_rooms_stacked", include_str!("../maps/two_rooms_stacked.json")),
    ("two_rooms_l", include_str!("../maps/two_rooms_l.json")),
    ("three_rooms", include_str!("../maps/three_rooms.json")),
    ("four_rooms", include_str!("../maps/four_rooms.json")),
];

/// The eight bundled plans: three single rooms, three two-room plans with
/// doorways and two plans with more rooms.
pub fn bundled() -> Vec<FloorPlan> {
    BUNDLED
        .iter()
        .map(|(id, text)| parse_map(text, id, MapFormat::Native, 1.0).expect("bundled maps parse"))
        .collect()
}

pub fn bundled_entries() -> Vec<MapEntry> {
    bundled().into_iter().map(|p| MapEntry { id: p.id.clone(), plan: Ok(p) }).collect()
}
