use std::path::{Path, PathBuf};

use explore_core::explore::{ActionScaling, LidarModel};
use explore_core::idiom::DecisionConfig;
use explore_core::sim::{EpisodeConfig, SimConfig};
use explore_core::svi::SviConfig;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::maps::MapFormat;
use crate::CliError;

/// Everything a run or batch reads from its JSON config. Missing keys take
/// their defaults; unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub maps: Vec<PathBuf>,
    pub format: MapFormat,
    /// Multiplies every map coordinate on load.
    pub scale: f64,
    /// Master seed; per-map seeds derive from it.
    pub seed: u64,
    /// Worker threads for batch runs.
    pub parallel: usize,
    pub sim: SimConfig,
    pub planner: DecisionConfig,
    pub svi: SviConfig,
    pub lidar: LidarModel,
    pub action: ActionScaling,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            maps: Vec::new(),
            format: MapFormat::Auto,
            scale: 1.0,
            seed: 0,
            parallel: 1,
            sim: SimConfig::default(),
            planner: DecisionConfig::default(),
            svi: SviConfig::default(),
            lidar: LidarModel::default(),
            action: ActionScaling::default(),
        }
    }
}

impl RunConfig {
    pub fn episode(&self) -> EpisodeConfig {
        EpisodeConfig {
            sim: self.sim.clone(),
            planner: self.planner.clone(),
            svi: self.svi.clone(),
            lidar: self.lidar.clone(),
            action: self.action.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(CliError::Config("invalid configuration: scale".into()));
        }
        if self.parallel == 0 {
            return Err(CliError::Config("invalid configuration: parallel".into()));
        }
        self.episode().validate().map_err(|e| CliError::Config(e.to_string()))
    }

    /// Defaults, then the file at `path`, then each `key=value` override in
    /// order. The result is validated.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut value = serde_json::to_value(RunConfig::default()).expect("defaults serialize");
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
            let file: RunConfig = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
            value = serde_json::to_value(file).expect("config serializes");
        }
        for assignment in overrides {
            apply_override(&mut value, assignment)?;
            serde_json::from_value::<RunConfig>(value.clone())
                .map_err(|e| CliError::Config(format!("--set {assignment}: {e}")))?;
        }
        let cfg: RunConfig = serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Sets the dotted key of `key=value` inside `root`. The value is parsed as
/// JSON and falls back to a plain string. Only existing keys can be set.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<(), CliError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("--set {assignment}: expected key=value")))?;
    let key = key.trim();
    let mut slot = &mut *root;
    for part in key.split('.') {
        slot = slot
            .as_object_mut()
            .and_then(|o| o.get_mut(part))
            .ok_or_else(|| CliError::Config(format!("--set {key}: unknown key")))?;
    }
    *slot = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    Ok(())
}

/// Master seed precedence: flag, then `EXPLORE_SEED`, then the config.
pub fn resolve_seed(config_seed: u64, flag: Option<u64>, env: Option<&str>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match env {
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("EXPLORE_SEED={v} is not an unsigned integer"))),
        None => Ok(config_seed),
    }
}
