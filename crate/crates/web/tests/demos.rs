use rirl_web::{convert_view, identify_run, learner_run};

#[test]
fn learner_frames_shrink_and_cover_theta() {
    let run = learner_run([0.4, -0.7], 0.05, 200, 3, false).unwrap();
    assert_eq!(run.frames[0].ellipse.axes, [2f64.sqrt(), 2f64.sqrt()]);
    assert!(run.mistakes as f64 <= run.mistake_bound);
    let first = &run.frames[0].ellipse;
    let last = &run.frames.last().unwrap().ellipse;
    assert!(last.axes[0] * last.axes[1] <= first.axes[0] * first.axes[1]);
    let json = serde_json::to_string(&run).unwrap();
    assert!(json.contains("\"frames\""));
}

#[test]
fn adversarial_learner_run_terminates() {
    let run = learner_run([0.1, 0.2], 0.05, 10_000, 0, true).unwrap();
    assert!(run.frames.len() < 10_000);
    assert_eq!(run.frames.iter().filter(|f| f.mistake).count(), run.mistakes);
}

#[test]
fn identify_history_starts_at_full_interval() {
    let run = identify_run(&[0.3, -0.8, 0.55], 0.01, 0.9).unwrap();
    assert_eq!(run.history[0][1], (-1.0, 1.0));
    assert_eq!(run.history.len(), run.tasks_used + 1);
    for (a, b) in run.theta_hat.iter().zip(&run.theta) {
        assert!((a - b).abs() <= 0.01);
    }
}

#[test]
fn conversion_view_round_trips() {
    let view = convert_view(&[vec![0.5, 0.25], vec![0.0, 0.1]], &[1.0, 2.0], 0.5).unwrap();
    assert!(view.round_trip_error <= 1e-12);
    assert!((view.reference_rows[0][0] - 0.4).abs() < 1e-12);
    assert!((view.occupancies[0][0] - 0.25).abs() < 1e-12);
    assert!(convert_view(&[vec![-0.5, 0.25], vec![0.0, 0.1]], &[1.0, 2.0], 0.5).is_err());
}
