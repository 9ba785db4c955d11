use explore_core::explore::*;
use explore_core::idiom::*;
use explore_core::prob::RandomStream;

fn open_grid(p: f64) -> OccupancyGrid {
    OccupancyGrid::new(40, 40, 0.2, Pose::new(0.0, 0.0), p).unwrap()
}

fn mean_information(grid: &OccupancyGrid, seeds: u64) -> f64 {
    let lidar = LidarModel::default();
    let action = ActionScaling::default();
    let cfg = DecisionConfig::default();
    let pose = Pose::new(1.1, 4.1);
    let env = ExplorationModel::new(grid, &lidar, &action, pose);
    (0..seeds)
        .map(|s| modality_information(&env, 0, &[pose.x, pose.y], &cfg, &mut RandomStream::new(s, 0)).unwrap())
        .sum::<f64>()
        / seeds as f64
}

#[test]
#[ignore = "does not hold for the specified beam model: a ray over known-free cells (0.05 each) spreads the first hit over the whole range and scores about 1.1 nats, while an all-unknown ray stops within a few cells and scores about 0.25"]
fn unknown_ray_carries_more_information_than_free_ray() {
    assert!(mean_information(&open_grid(P_UNKNOWN), 20) > mean_information(&open_grid(P_FREE), 20));
}

#[test]
fn certain_walls_carry_the_least_information() {
    let wall = mean_information(&open_grid(P_OCCUPIED), 20);
    assert!(wall < mean_information(&open_grid(P_UNKNOWN), 20));
    assert!(wall < mean_information(&open_grid(P_FREE), 20));
}

/// Room with walls certainly occupied and interior certainly free.
fn walled_room(side_cells: usize) -> OccupancyGrid {
    let mut g = OccupancyGrid::new(side_cells, side_cells, 0.2, Pose::new(0.0, 0.0), 0.0).unwrap();
    let n = side_cells as i64;
    for i in 0..n {
        for (x, y) in [(i, 0), (i, n - 1), (0, i), (n - 1, i)] {
            g.set(x, y, 1.0).unwrap();
        }
    }
    g
}

fn constraint_at(grid: &OccupancyGrid, lidar: &LidarModel, clearance: f64, samples: usize) -> f64 {
    let action = ActionScaling::default();
    // the wall's inner face sits one cell in from the origin
    let x = 0.2 + clearance;
    let y = 0.5 * grid.height() as f64 * grid.resolution();
    let env = ExplorationModel::new(grid, lidar, &action, Pose::new(x, y));
    let cfg = DecisionConfig { constraint_samples: samples, ..Default::default() };
    let beams: Vec<usize> = (0..lidar.beam_count).step_by(15).collect();
    constraint_probability(&env, &[x, y], &beams, &cfg, &mut RandomStream::new(1, 0)).unwrap()
}

#[test]
fn constraint_approaches_one_with_clearance() {
    let grid = walled_room(60);
    let lidar = LidarModel { w_hit: 0.95, w_rand: 0.0, w_max: 0.05, ..LidarModel::default() };
    let cfg = DecisionConfig::default();
    let far = cfg.d_min + 5.0 / cfg.sigma_c;
    let values: Vec<f64> = [0.1, 0.3, far, far + 0.5, far + 1.5, 5.5].iter().map(|c| constraint_at(&grid, &lidar, *c, 400)).collect();
    for w in values.windows(2) {
        assert!(w[1] >= w[0] - 0.01, "{values:?}");
    }
    assert!(values[0] < 0.1);
    assert!(*values.last().unwrap() > 0.99, "{values:?}");
}

#[test]
fn default_beam_model_plateaus_at_the_random_reading_limit() {
    // with every wall beyond range only the uniform component can read
    // short, so each beam's mean tends to w_hit + w_max + w_rand · m where
    // m is the logistic's average over [0, z̄]
    let lidar = LidarModel::default();
    let cfg = DecisionConfig::default();
    let zmax = lidar.max_range;
    let s = cfg.sigma_c;
    let softplus = |v: f64| v.max(0.0) + (-v.abs()).exp().ln_1p();
    let m = (softplus(s * (zmax - cfg.d_min)) - softplus(-s * cfg.d_min)) / (s * zmax);
    let per_beam = lidar.w_hit + lidar.w_max + lidar.w_rand * m;
    let limit = per_beam.powi(24);
    let got = constraint_at(&walled_room(60), &lidar, 5.5, 4000);
    assert!((got - limit).abs() < 0.01, "{got} vs {limit}");
}

#[test]
fn beam_density_integrates_to_one() {
    let mut rng = RandomStream::new(12, 0);
    for _ in 0..20 {
        let mut w: Vec<f64> = (0..4).map(|_| rng.uniform()).collect();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= total);
        let lidar = LidarModel {
            w_hit: w[0],
            w_short: w[1],
            w_rand: w[2],
            w_max: 1.0 - w[0] - w[1] - w[2],
            lambda_short: 0.2 + 3.0 * rng.uniform(),
            ..LidarModel::default()
        };
        let d = 0.05 + 3.95 * rng.uniform();
        let n = 40_000;
        let h = lidar.max_range / n as f64;
        let mut integral = 0.0;
        for k in 0..=n {
            let f = lidar.beam_likelihood(d, k as f64 * h).unwrap().exp();
            integral += if k == 0 || k == n { 0.5 * f } else { f };
        }
        integral *= h;
        assert!((integral - 1.0).abs() <= 1e-3, "{lidar:?} d = {d}: {integral}");
    }
}

#[test]
fn ray_trace_rejects_poses_outside_the_grid() {
    let g = open_grid(P_FREE);
    assert!(matches!(ray_trace(&g, Pose::new(-0.1, 1.0), 0.0, 4.0), Err(ExploreError::OutOfBounds { .. })));
}

#[test]
fn transition_moves_by_the_scaled_motor() {
    let scaling = ActionScaling::default();
    let d = transition_distribution(Pose::new(1.0, 2.0), &MotorCommand::new([0.75, 0.5]).unwrap(), &scaling).unwrap();
    let mean = d.mean();
    assert!((mean[0] - 1.5).abs() < 1e-15 && (mean[1] - 2.0).abs() < 1e-15);
}
