use rirl_core::bandit::spread;
use rirl_core::bounds;
use rirl_core::nalgebra::DMatrix;
use rirl_harness::config::{StreamSource, TieBreakStrategy};
use rirl_harness::run::{fixed_features, load_task_stream, round_trip_error};
use rirl_harness::{check_bounds, run_experiment, ExperimentConfig, ExperimentKind};

#[test]
fn csv_bound_column_matches_closed_forms() {
    let cases = [
        (ExperimentKind::Identify, 5, 0.01, bounds::identification_tasks(0.01) as f64),
        (ExperimentKind::Mistakes, 3, 0.1, bounds::ellipsoid_mistake_bound(3, 0.1)),
        (ExperimentKind::Lowerbound, 4, 0.01, bounds::adversary_lower_bound(4, 0.01)),
    ];
    for (kind, d, eps, bound) in cases {
        let c = ExperimentConfig::new(kind, d, eps, vec![0, 1]);
        let report = run_experiment(&c).unwrap();
        for r in &report.runs {
            assert_eq!(r.bound, bound, "{kind:?}");
        }
    }
}

#[test]
fn adversary_stream_replays_identically() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = ExperimentConfig::new(ExperimentKind::Mistakes, 3, 0.05, vec![4]);
    c.record_stream = true;
    c.out_dir = Some(dir.path().to_path_buf());
    let first = run_experiment(&c).unwrap();
    let stream = dir.path().join("streams/seed_4.jsonl");
    let tasks = load_task_stream(&stream).unwrap();
    assert_eq!(tasks.len(), first.runs[0].rounds);
    let mut replay = ExperimentConfig::new(ExperimentKind::Mistakes, 3, 0.05, vec![4]);
    replay.stream = Some(StreamSource::Replay(stream));
    let second = run_experiment(&replay).unwrap();
    assert_eq!(first.runs[0].mistakes, second.runs[0].mistakes);
    assert_eq!(first.runs[0].final_center_error, second.runs[0].final_center_error);
}

#[test]
fn fixed_environment_runs_meet_the_accuracy_bound() {
    let mut c = ExperimentConfig::new(ExperimentKind::Fixedenv, 3, 0.05, (0..10).collect());
    c.num_actions = Some(6);
    c.tie_break = TieBreakStrategy::WorstCaseOracle;
    let x = fixed_features(&c).unwrap();
    assert!(spread(&x) >= 0.1);
    let report = run_experiment(&c).unwrap();
    assert!(check_bounds(&report).passed);
    for r in &report.runs {
        assert_eq!(r.bound, bounds::spread_accuracy_bound(0.05, 6, spread(&x)));
    }
}

#[test]
fn degenerate_features_are_a_config_error() {
    let mut c = ExperimentConfig::new(ExperimentKind::Fixedenv, 2, 0.05, vec![0]);
    c.features = Some(vec![vec![0.2, 0.1], vec![0.2, 0.1]]);
    assert_eq!(run_experiment(&c).unwrap_err().exit_code(), 2);
}

#[test]
fn trajectory_runs_log_demo_masses() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = ExperimentConfig::new(ExperimentKind::Trajectory, 4, 0.1, vec![0, 1]);
    c.batch_size = Some(3);
    c.rounds = Some(300);
    c.out_dir = Some(dir.path().to_path_buf());
    let report = run_experiment(&c).unwrap();
    assert!(check_bounds(&report).passed);
    assert_eq!(report.aggregate.invariant_violations, 0);
    let log = std::fs::read_to_string(dir.path().join("rounds/seed_0.jsonl")).unwrap();
    assert_eq!(log.lines().count(), 300);
    let h = bounds::trajectory_horizon(0.1, 0.9);
    for line in log.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        if let Some(m) = v.get("demo_mass") {
            assert!((m.as_f64().unwrap() - (1.0 - 0.9f64.powi(h as i32))).abs() < 1e-12);
        }
    }
}

#[test]
fn round_trip_of_a_hand_built_task() {
    let x = DMatrix::from_column_slice(2, 2, &[0.5, 0.25, 0.0, 0.1]);
    let task = rirl_core::bandit::BanditTask::new(x, rirl_core::reward_space::TaskReward(vec![0.3, -0.2])).unwrap();
    assert!(round_trip_error(&task, 0.5).unwrap() <= 1e-12);
    assert!(round_trip_error(&task, 0.9).unwrap() <= 1e-12);
}
