use std::path::{Path, PathBuf};

use explore_core::sim::{measure_ratio, rasterize, EpisodeReport, Termination};

use crate::batch::{map_seed, run_batch, run_timed, to_csv, BatchOutcome, MetricsRow};
use crate::config::RunConfig;
use crate::maps::{bundled, bundled_entries, load_dir, load_entry, load_map};
use crate::plot::render_svg;
use crate::CliError;

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Setup(format!("cannot write {}: {e}", path.display())))
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Setup(format!("cannot create {}: {e}", dir.display())))
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// One episode on the first configured map. Writes `report.json`,
/// `metrics.csv` and, with `svg`, `trajectory.svg` into `out`.
pub fn run(cfg: &RunConfig, out: &Path, svg: bool) -> Result<EpisodeReport, CliError> {
    let path = match cfg.maps.as_slice() {
        [p] => p,
        [] => return Err(CliError::Config("run needs a map (--map or maps in the config)".into())),
        _ => return Err(CliError::Config("run takes exactly one map; use batch for several".into())),
    };
    let plan = load_map(path, cfg.format, cfg.scale)?;
    let seed = map_seed(cfg.seed, &plan.id);
    let report = run_timed(&plan, &cfg.episode(), seed).map_err(|e| CliError::Setup(format!("map {}: {e}", path.display())))?;
    create_dir(out)?;
    write(&out.join("report.json"), &to_json(&report))?;
    write(&out.join("metrics.csv"), &to_csv(&[MetricsRow::from_report(&report)]))?;
    if svg {
        let doc = render_svg(&report).map_err(CliError::Setup)?;
        write(&out.join("trajectory.svg"), &doc)?;
    }
    Ok(report)
}

/// Where a batch takes its maps from.
#[derive(Clone, Debug)]
pub enum MapSource {
    Dir(PathBuf),
    Files(Vec<PathBuf>),
    Bundled,
}

/// One episode per map. Writes `metrics.csv`, `summary.json` and one
/// report per successful map under `reports/`.
pub fn batch(cfg: &RunConfig, source: &MapSource, out: &Path) -> Result<BatchOutcome, CliError> {
    let maps = match source {
        MapSource::Dir(d) => load_dir(d, cfg.format, cfg.scale)?,
        MapSource::Files(files) => files.iter().map(|p| load_entry(p, cfg.format, cfg.scale)).collect(),
        MapSource::Bundled => bundled_entries(),
    };
    let mut ids: Vec<&str> = maps.iter().map(|m| m.id.as_str()).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(CliError::Config(format!("two maps share the id {}", w[0])));
    }
    let outcome = run_batch(&maps, &cfg.episode(), cfg.seed, cfg.parallel);
    create_dir(&out.join("reports"))?;
    write(&out.join("metrics.csv"), &to_csv(&outcome.rows))?;
    write(&out.join("summary.json"), &to_json(&outcome.summary))?;
    for r in outcome.reports.iter().flatten() {
        write(&out.join("reports").join(format!("{}.json", r.map_id)), &to_json(r))?;
    }
    Ok(outcome)
}

/// SVG for the report stored at `path`.
pub fn plot(path: &Path) -> Result<String, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read report {}: {e}", path.display())))?;
    let report: EpisodeReport =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("report {}: {e}", path.display())))?;
    render_svg(&report).map_err(|e| CliError::Config(format!("report {}: {e}", path.display())))
}

/// Quick end-to-end checks on the smallest bundled map. Returns one line
/// per check and whether all passed.
pub fn selftest() -> (Vec<String>, bool) {
    let mut lines = Vec::new();
    let mut ok = true;
    let mut check = |name: &str, pass: bool| {
        lines.push(format!("{} {name}", if pass { "ok  " } else { "FAIL" }));
        ok &= pass;
    };
    let cfg = RunConfig::default();
    check("default configuration validates", cfg.validate().is_ok());
    let plans = bundled();
    check("bundled suite has 8 maps", plans.len() == 8);
    check("bundled maps rasterize", plans.iter().all(|p| rasterize(p, cfg.sim.resolution).is_ok()));
    let room = &plans[0];
    match (run_timed(room, &cfg.episode(), 7), run_timed(room, &cfg.episode(), 7)) {
        (Ok(a), Ok(b)) => {
            check("small room ends by ratio", a.termination == Termination::Ratio);
            check("small room has no collisions", a.collisions == 0);
            let truth = rasterize(room, cfg.sim.resolution).ok();
            check("final ratio matches the known map", truth.is_some_and(|t| measure_ratio(&a.known_map, &t) == Ok(a.explored_ratio)));
            let same = MetricsRow::from_report(&a).deterministic_fields() == MetricsRow::from_report(&b).deterministic_fields();
            check("episode replays from its seed", same);
            check("plot renders", render_svg(&a).is_ok());
        }
        (Err(e), _) | (_, Err(e)) => check(&format!("small room episode runs ({e})"), false),
    }
    (lines, ok)
}
