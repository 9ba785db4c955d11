use explore_core::explore::{LidarModel, OccupancyGrid, Pose, P_UNKNOWN};
use explore_core::prob::RandomStream;
use explore_core::sim::*;

fn room(w: f64, h: f64) -> FloorPlan {
    FloorPlan::new("room".into(), vec![vec![[0.0, 0.0], [w, 0.0], [w, h], [0.0, h]]], vec![], Some(1)).unwrap()
}

fn l_shape() -> FloorPlan {
    let outline = vec![[0.0, 0.0], [6.0, 0.0], [6.0, 2.5], [2.5, 2.5], [2.5, 5.0], [0.0, 5.0]];
    FloorPlan::new("l".into(), vec![outline], vec![], Some(1)).unwrap()
}

fn quick(budget: usize) -> EpisodeConfig {
    let mut cfg = EpisodeConfig::default();
    cfg.sim.step_budget = budget;
    cfg
}

fn random_truth(rng: &mut RandomStream) -> GroundTruthGrid {
    let w = 3 + rng.below(20);
    let h = 3 + rng.below(20);
    let cells = (0..w * h).map(|_| if rng.uniform() < 0.25 { 1.0 } else { 0.0 }).collect();
    let grid = OccupancyGrid::from_cells(w, h, 0.2, Pose::new(0.0, 0.0), cells).unwrap();
    GroundTruthGrid::from_grid(grid).unwrap()
}

#[test]
fn ratio_stays_in_unit_interval_under_fuzzed_updates() {
    let mut rng = RandomStream::new(99, 0);
    let lidar = LidarModel { beam_count: 36, ..LidarModel::default() };
    for case in 0..10_000 {
        let truth = random_truth(&mut rng);
        let g = truth.grid();
        let mut known = OccupancyGrid::unknown(g.width(), g.height(), g.resolution(), g.origin()).unwrap();
        for _ in 0..rng.below(4) {
            let ix = 1 + rng.below(g.width() - 2) as i64;
            let iy = 1 + rng.below(g.height() - 2) as i64;
            if truth.is_free(ix, iy) {
                let pose = g.cell_center(ix, iy);
                let ranges = simulate_scan(&truth, pose, &lidar, &mut rng).unwrap();
                update_known_map(&mut known, pose, &ranges, &lidar).unwrap();
            }
        }
        // arbitrary writes, including over walls
        for _ in 0..rng.below(10) {
            let ix = rng.below(g.width()) as i64;
            let iy = rng.below(g.height()) as i64;
            known.set(ix, iy, rng.uniform()).unwrap();
        }
        let got = measure_ratio(&known, &truth).unwrap();
        let free: Vec<usize> = (0..g.cells().len()).filter(|&i| g.cells()[i] == 0.0).collect();
        let seen = free.iter().filter(|&&i| known.cells()[i] != P_UNKNOWN).count();
        let expected = if free.is_empty() { 0.0 } else { seen as f64 / free.len() as f64 };
        assert!((0.0..=1.0).contains(&got), "case {case}: {got}");
        assert_eq!(got, expected, "case {case}");
    }
}

#[test]
fn misaligned_maps_are_rejected() {
    let truth = rasterize(&room(4.0, 4.0), 0.2).unwrap();
    let known = OccupancyGrid::unknown(3, 3, 0.2, Pose::new(0.0, 0.0)).unwrap();
    assert_eq!(measure_ratio(&known, &truth), Err(SimError::Alignment));
}

#[test]
fn episode_bookkeeping() {
    let report = run_episode(&room(8.0, 8.0), &quick(12), 3).unwrap();
    assert!(report.steps <= 12);
    assert_eq!(report.ratio_series.len(), report.steps);
    assert!(report.ratio_series.windows(2).all(|w| w[1] >= w[0]));
    assert!(report.ratio_series.iter().all(|r| (0.0..=1.0).contains(r)));
    assert_eq!(report.explored_ratio, *report.ratio_series.last().unwrap());
    assert_eq!(report.collisions, report.collision_points.len());
    // a pose is pushed for every motion, which follows every scan but a final one
    let motions = report.trajectory.len() - 1;
    assert!(motions == report.steps || (motions + 1 == report.steps && report.termination == Termination::Ratio));
}

#[test]
fn collisions_count_exactly_the_truncated_motions() {
    let truth = rasterize(&l_shape(), 0.2).unwrap();
    let mut rng = RandomStream::new(5, 0);
    let mut pose = choose_start(&truth, 0.4, &mut rng).unwrap();
    let (mut collisions, mut truncated) = (0, 0);
    for _ in 0..2000 {
        let d = [2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0];
        let out = apply_motion(&truth, pose, d, 0.15, 0.1).unwrap();
        if out.contact.is_some() {
            collisions += 1;
        }
        if out.travelled < 1.0 && d != [0.0, 0.0] {
            truncated += 1;
        }
        pose = out.pose;
    }
    assert!(collisions > 0);
    assert_eq!(collisions, truncated);
}

#[test]
fn empty_budget_takes_no_scan() {
    let r = run_episode(&room(4.0, 4.0), &quick(0), 1).unwrap();
    assert_eq!(r.steps, 0);
    assert_eq!(r.explored_ratio, 0.0);
    assert_eq!(r.termination, Termination::Budget);
}

#[test]
fn small_room_ends_by_ratio() {
    let r = run_episode(&room(4.0, 4.0), &quick(200), 7).unwrap();
    assert_eq!(r.termination, Termination::Ratio);
    assert!(r.steps < 200);
    assert_eq!(r.collisions, 0);
}

#[test]
fn episodes_replay_from_the_seed() {
    let plan = l_shape();
    let a = run_episode(&plan, &quick(6), 42).unwrap();
    let b = run_episode(&plan, &quick(6), 42).unwrap();
    assert_eq!(a, b);
    let c = run_episode(&plan, &quick(6), 43).unwrap();
    assert_ne!(a.trajectory, c.trajectory);
}

#[test]
fn free_area_agrees_across_resolutions() {
    for plan in [room(5.0, 3.0), l_shape()] {
        let coarse = rasterize(&plan, 0.2).unwrap().free_area();
        let fine = rasterize(&plan, 0.1).unwrap().free_area();
        assert!((coarse - fine).abs() <= 0.1 * fine, "{coarse} vs {fine}");
    }
}

#[test]
fn invalid_settings_are_rejected() {
    let mut cfg = quick(10);
    cfg.sim.termination_ratio = 1.5;
    assert!(matches!(run_episode(&room(4.0, 4.0), &cfg, 0), Err(SimError::InvalidConfig(_))));
}
