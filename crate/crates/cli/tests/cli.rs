use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use explore_cli::batch::{map_seed, CSV_HEADER};
use explore_cli::config::{apply_override, resolve_seed, RunConfig};
use explore_cli::maps::{bundled, parse_map, MapFormat};

const ROOM: &str = r#"{"id": "room_4x4", "rooms": 1, "polygons": [[[0, 0], [4, 0], [4, 4], [0, 4]]]}"#;

fn explore(args: &[&str], env_seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_explore"));
    cmd.args(args).env_remove("EXPLORE_SEED");
    if let Some(s) = env_seed {
        cmd.env("EXPLORE_SEED", s);
    }
    cmd.output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn csv_rows(path: &Path) -> Vec<String> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    lines.map(str::to_string).collect()
}

fn without_time(row: &str) -> &str {
    row.rsplit_once(',').unwrap().0
}

#[test]
fn run_writes_report_and_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(dir.path(), "room.json", ROOM);
    let out = dir.path().join("out");
    let o = explore(&["run", "--map", map.to_str().unwrap(), "--seed", "7", "--out", out.to_str().unwrap(), "--svg"], None);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&out.join("metrics.csv"));
    assert_eq!(rows.len(), 1);
    assert!(rows[0].starts_with("room_4x4,16,1,"));
    assert!(rows[0].contains(&format!(",{},", map_seed(7, "room_4x4"))));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["map_id"], "room_4x4");
    roxmltree::Document::parse(&std::fs::read_to_string(out.join("trajectory.svg")).unwrap()).unwrap();
}

#[test]
fn repeated_runs_match_except_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(dir.path(), "room.json", ROOM);
    let rows: Vec<String> = (0..2)
        .map(|i| {
            let out = dir.path().join(format!("out{i}"));
            let args = ["run", "--map", map.to_str().unwrap(), "--seed", "3", "--out", out.to_str().unwrap(), "--set", "sim.step_budget=3"];
            assert!(explore(&args, None).status.success());
            csv_rows(&out.join("metrics.csv")).remove(0)
        })
        .collect();
    assert_eq!(without_time(&rows[0]), without_time(&rows[1]));
}

#[test]
fn missing_map_is_a_config_error_naming_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let o = explore(&["run", "--map", "missing.json", "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("missing.json"));
}

#[test]
fn map_without_room_for_the_robot_is_a_setup_error() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(dir.path(), "tiny.json", r#"{"polygons": [[[0, 0], [0.6, 0], [0.6, 0.6], [0, 0.6]]]}"#);
    let o = explore(&["run", "--map", map.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn bad_overrides_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(dir.path(), "room.json", ROOM);
    let out = dir.path().join("o");
    let base = ["run", "--map", map.to_str().unwrap(), "--out", out.to_str().unwrap(), "--set"];
    for (set, needle) in [
        ("planner.sigma_q=1", "planner.sigma_q"),
        ("planner.lambda_p_min=2", "planner.lambda_p_min"),
        ("sim.step_budget=lots", "sim.step_budget"),
        ("svi.particles=0", "svi.particles"),
    ] {
        let mut args = base.to_vec();
        args.push(set);
        let o = explore(&args, None);
        assert_eq!(o.status.code(), Some(2), "{set}");
        assert!(stderr(&o).contains(needle), "{set}: {}", stderr(&o));
    }
}

#[test]
fn config_file_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", r#"{"planner": {"sigma_p": 0.1, "bogus": 1}}"#);
    let err = RunConfig::load(Some(&cfg), &[]).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("bogus"));
    let ok = write(dir.path(), "ok.json", r#"{"planner": {"sigma_p": 0.1}, "seed": 9}"#);
    let cfg = RunConfig::load(Some(&ok), &["svi.iterations=5".into()]).unwrap();
    assert_eq!((cfg.planner.sigma_p, cfg.seed, cfg.svi.iterations), (0.1, 9, 5));
    assert_eq!(cfg.lidar, RunConfig::default().lidar);
}

#[test]
fn overrides_only_touch_existing_keys() {
    let mut v = serde_json::to_value(RunConfig::default()).unwrap();
    apply_override(&mut v, "action.sigma_a=[0.1, 0.2]").unwrap();
    apply_override(&mut v, "format=houseexpo").unwrap();
    let cfg: RunConfig = serde_json::from_value(v.clone()).unwrap();
    assert_eq!(cfg.action.sigma_a, [0.1, 0.2]);
    assert_eq!(cfg.format, MapFormat::HouseExpo);
    assert!(apply_override(&mut v, "sim.resolution.x=1").is_err());
    assert!(apply_override(&mut v, "noequals").is_err());
}

#[test]
fn seed_precedence() {
    assert_eq!(resolve_seed(1, None, None).unwrap(), 1);
    assert_eq!(resolve_seed(1, None, Some("5")).unwrap(), 5);
    assert_eq!(resolve_seed(1, Some(8), Some("5")).unwrap(), 8);
    assert_eq!(resolve_seed(1, None, Some("x")).unwrap_err().exit_code(), 2);
}

#[test]
fn env_seed_reaches_the_episode() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(dir.path(), "room.json", ROOM);
    let out = dir.path().join("o");
    let args = ["run", "--map", map.to_str().unwrap(), "--out", out.to_str().unwrap(), "--set", "sim.step_budget=1"];
    assert!(explore(&args, Some("11")).status.success());
    let row = csv_rows(&out.join("metrics.csv")).remove(0);
    assert!(row.contains(&format!(",{},", map_seed(11, "room_4x4"))));
}

#[test]
fn map_seeds_do_not_depend_on_order() {
    let a = map_seed(4, "two_rooms_door");
    assert_eq!(a, map_seed(4, "two_rooms_door"));
    assert_ne!(a, map_seed(5, "two_rooms_door"));
    assert_ne!(a, map_seed(4, "room_8x8"));
}

#[test]
fn bundled_suite_layout() {
    let plans = bundled();
    assert_eq!(plans.len(), 8);
    let count = |f: &dyn Fn(usize) -> bool| plans.iter().filter(|p| p.rooms.is_some_and(f)).count();
    assert_eq!((count(&|r| r == 1), count(&|r| r == 2), count(&|r| r >= 3)), (3, 3, 2));
    for p in plans.iter().filter(|p| p.rooms == Some(1)) {
        let area = explore_core::sim::rasterize(p, 0.2).unwrap().free_area();
        assert!(area <= 100.0, "{} {area}", p.id);
    }
    assert!(plans.iter().any(|p| p.id == "room_4x4"));
}

#[test]
fn houseexpo_outline_is_scaled() {
    let text = r#"{"id": "h1", "room_num": 2, "bbox": {"min": [0, 0], "max": [40, 20]},
                   "verts": [[0, 0], [40, 0], [40, 20], [0, 20]], "room_category": {}}"#;
    let plan = parse_map(text, "fallback", MapFormat::Auto, 0.1).unwrap();
    assert_eq!(plan.id, "h1");
    assert_eq!(plan.rooms, Some(2));
    assert_eq!(plan.size(), [4.0, 2.0]);
    assert!(parse_map(text, "x", MapFormat::Native, 1.0).is_err());
}

#[test]
fn file_scale_multiplies_the_configured_scale() {
    let native = r#"{"id": "n", "scale_m_per_unit": 0.5, "polygons": [[[0, 0], [10, 0], [10, 6], [0, 6]]]}"#;
    assert_eq!(parse_map(native, "n", MapFormat::Auto, 1.0).unwrap().size(), [5.0, 3.0]);
    assert_eq!(parse_map(native, "n", MapFormat::Auto, 2.0).unwrap().size(), [10.0, 6.0]);
    let expo = r#"{"id": "h", "scale_m_per_unit": 0.01, "verts": [[0, 0], [400, 0], [400, 200], [0, 200]]}"#;
    assert_eq!(parse_map(expo, "h", MapFormat::Auto, 1.0).unwrap().size(), [4.0, 2.0]);
    let bad = r#"{"scale_m_per_unit": 0, "polygons": [[[0, 0], [1, 0], [1, 1]]]}"#;
    assert!(parse_map(bad, "b", MapFormat::Native, 1.0).unwrap_err().contains("scale_m_per_unit"));
}

fn small_maps(dir: &Path) {
    write(dir, "a.json", ROOM);
    write(dir, "b.json", r#"{"id": "hall", "rooms": 1, "polygons": [[[0, 0], [6, 0], [6, 3], [0, 3]]]}"#);
    write(
        dir,
        "c.json",
        r#"{"id": "pair", "rooms": 2, "polygons": [[[0, 0], [6, 0], [6, 3], [0, 3]]], "walls": [[[3, 0], [3, 1]], [[3, 2], [3, 3]]]}"#,
    );
    write(dir, "d.json", r#"{"id": "broken", "polygons": [[[0, 0], [1, 0]]]}"#);
}

#[test]
fn batch_is_sorted_and_independent_of_parallelism() {
    let dir = tempfile::tempdir().unwrap();
    let maps = dir.path().join("maps");
    std::fs::create_dir(&maps).unwrap();
    small_maps(&maps);
    let run = |parallel: &str, name: &str| {
        let out = dir.path().join(name);
        let o = explore(
            &["batch", "--maps-dir", maps.to_str().unwrap(), "--parallel", parallel, "--seed", "2", "--out", out.to_str().unwrap(), "--set", "sim.step_budget=3"],
            None,
        );
        assert!(o.status.success(), "{}", stderr(&o));
        out
    };
    let (one, four) = (run("1", "p1"), run("4", "p4"));
    let a = csv_rows(&one.join("metrics.csv"));
    let b = csv_rows(&four.join("metrics.csv"));
    assert_eq!(a.len(), 4);
    let strip: fn(&Vec<String>) -> Vec<&str> = |v| v.iter().map(|r| without_time(r)).collect();
    assert_eq!(strip(&a), strip(&b));
    let ids: Vec<&str> = a.iter().map(|r| r.split(',').next().unwrap()).collect();
    // the interior wall makes pair smaller than hall
    assert_eq!(ids, ["room_4x4", "pair", "hall", "d"]);
    assert!(a[3].contains(",error,"));
    assert!(one.join("reports").join("pair.json").exists());
    assert_summary_matches_csv(&one);
}

/// Recomputes the summary from the CSV text alone.
fn assert_summary_matches_csv(out: &Path) {
    let rows = csv_rows(&out.join("metrics.csv"));
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    let mut ratios = Vec::new();
    let (mut steps, mut collisions, mut failed) = (0u64, 0u64, 0u64);
    let mut by_rooms: std::collections::BTreeMap<String, Vec<f64>> = Default::default();
    for r in &rows {
        let f: Vec<&str> = r.split(',').collect();
        if f[7] == "error" {
            failed += 1;
            continue;
        }
        let ratio: f64 = f[4].parse().unwrap();
        ratios.push(ratio);
        steps += f[3].parse::<u64>().unwrap();
        collisions += f[6].parse::<u64>().unwrap();
        by_rooms.entry(f[2].to_string()).or_default().push(ratio);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 { sorted[n / 2] } else { 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]) };
    assert_eq!(summary["mean_explored_ratio"].as_f64().unwrap(), mean);
    assert_eq!(summary["median_explored_ratio"].as_f64().unwrap(), median);
    assert_eq!(summary["total_steps"].as_u64().unwrap(), steps);
    assert_eq!(summary["total_collisions"].as_u64().unwrap(), collisions);
    assert_eq!(summary["failed"].as_u64().unwrap(), failed);
    assert_eq!(summary["collisions_per_1000_steps"].as_f64().unwrap(), 1000.0 * collisions as f64 / steps as f64);
    let groups = summary["by_rooms"].as_array().unwrap();
    assert_eq!(groups.len(), by_rooms.len());
    for g in groups {
        let key = g["rooms"].as_u64().map(|v| v.to_string()).unwrap_or_default();
        let v = &by_rooms[&key];
        assert_eq!(g["mean_explored_ratio"].as_f64().unwrap(), v.iter().sum::<f64>() / v.len() as f64);
    }
}

#[test]
fn bundled_batch_has_eight_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = explore(&["batch", "--out", out.to_str().unwrap(), "--set", "sim.step_budget=1"], None);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&out.join("metrics.csv"));
    assert_eq!(rows.len(), 8);
    let areas: Vec<f64> = rows.iter().map(|r| r.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(areas.windows(2).all(|w| w[0] <= w[1]));
    assert_summary_matches_csv(&out);
}

#[test]
fn empty_maps_dir_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = explore(&["batch", "--maps-dir", dir.path().to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
}

fn report_file(dir: &Path, budget: &str) -> PathBuf {
    let map = write(dir, "room.json", ROOM);
    let out = dir.join(format!("run{budget}"));
    let args = ["run", "--map", map.to_str().unwrap(), "--out", out.to_str().unwrap(), "--set"];
    let set = format!("sim.step_budget={budget}");
    let mut a = args.to_vec();
    a.push(&set);
    assert!(explore(&a, None).status.success());
    out.join("report.json")
}

#[test]
fn plot_is_well_formed_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let report = report_file(dir.path(), "2");
    let a = explore(&["plot", "--report", report.to_str().unwrap()], None);
    let b = explore(&["plot", "--report", report.to_str().unwrap()], None);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    let root = doc.root_element();
    assert_eq!(root.tag_name().name(), "svg");
    assert_eq!(root.attribute("version"), Some("1.1"));
    assert!(doc.descendants().any(|n| n.attribute("id") == Some("start")));
}

#[test]
fn empty_episode_plots_map_and_start_only() {
    let dir = tempfile::tempdir().unwrap();
    let report = report_file(dir.path(), "0");
    let svg = dir.path().join("empty.svg");
    let o = explore(&["plot", "--report", report.to_str().unwrap(), "--out", svg.to_str().unwrap()], None);
    assert!(o.status.success());
    let text = std::fs::read_to_string(svg).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    let ids: Vec<&str> = doc.descendants().filter_map(|n| n.attribute("id")).collect();
    assert_eq!(ids, ["map", "start"]);
}

#[test]
fn malformed_report_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"map_id": 3}"#);
    assert_eq!(explore(&["plot", "--report", bad.to_str().unwrap()], None).status.code(), Some(2));
}

#[test]
fn selftest_passes() {
    let o = explore(&["selftest"], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(!String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}
