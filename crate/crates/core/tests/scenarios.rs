use morphquad::dynamics::DisturbanceParams;
use morphquad::harness::config::PayloadAction;
use morphquad::harness::{
    bundled, compare_logs, load_config, parse_config, run_batch, run_scenario, seed_batch, simulate, sweep_dir,
    LogTable, RunMetrics,
};
use morphquad::parallel::Execution;
use morphquad::Error;

const HOVER: &str = r#"
name = "still"
duration = "3 s"
mass_estimate_ratio = 1.0
[trajectory]
kind = "hover"
position = ["0.2 m", "-0.1 m", "1 m"]
[disturbance]
enabled = false
"#;

#[test]
fn undisturbed_hover_stays_put() {
    let cfg = parse_config(HOVER).unwrap();
    let out = simulate(&cfg).unwrap();
    for e in out.metrics.rms_error {
        assert!(e < 1e-6, "{e}");
    }
    assert_eq!(out.metrics.saturation_ticks, 0);
}

#[test]
fn log_has_one_row_per_tick_and_no_nan() {
    let cfg = parse_config(HOVER).unwrap();
    let out = simulate(&cfg).unwrap();
    assert_eq!(out.log.rows.len(), (3.0f64 / 0.002).floor() as usize + 1);
    assert!(out.log.rows.iter().flatten().all(|x| x.is_finite()));
    assert!((out.log.duration() - 3.0).abs() < 1e-12);
}

#[test]
fn same_seed_same_bytes() {
    let cfg = bundled("hover_morph").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (a, _) = run_scenario(&cfg, &dir.path().join("a")).unwrap();
    let (b, _) = run_scenario(&cfg, &dir.path().join("b")).unwrap();
    assert_eq!(std::fs::read(a.log).unwrap(), std::fs::read(b.log).unwrap());
    assert_eq!(std::fs::read(a.metrics).unwrap(), std::fs::read(b.metrics).unwrap());
}

#[test]
fn different_seed_different_run() {
    let cfg = bundled("hover_morph").unwrap();
    let runs = seed_batch(&cfg, &[1, 2], Execution::Sequential);
    assert_ne!(runs[0].as_ref().unwrap(), runs[1].as_ref().unwrap());
}

#[test]
fn metrics_recompute_from_csv() {
    let cfg = bundled("grasp_transport").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (files, out) = run_scenario(&cfg, dir.path()).unwrap();
    let log = LogTable::read_csv(&files.log).unwrap();
    assert_eq!(log, out.log);
    assert_eq!(RunMetrics::from_log(&log, cfg.settle_band).unwrap(), out.metrics);
    let json: RunMetrics = serde_json::from_slice(&std::fs::read(files.metrics).unwrap()).unwrap();
    assert_eq!(json, out.metrics);
}

#[test]
fn events_are_flagged_in_the_log() {
    let cfg = bundled("grasp_transport").unwrap();
    let out = simulate(&cfg).unwrap();
    let times: Vec<f64> = out.metrics.settling.iter().map(|s| s.event_time).collect();
    assert_eq!(times.len(), cfg.event_times().len());
    for (t, e) in times.iter().zip(cfg.event_times()) {
        assert!((t - e).abs() < 2e-3, "{t} vs {e}");
    }
}

#[test]
fn payload_changes_true_mass() {
    let cfg = bundled("grasp_transport").unwrap();
    let attach = cfg.payload.iter().find(|p| p.action == PayloadAction::Attach).unwrap().clone();
    let out = simulate(&cfg).unwrap();
    let mass = out.log.series("mass").unwrap();
    let t = out.log.series("t").unwrap();
    let before = mass[t.iter().position(|x| *x >= attach.time - 0.1).unwrap()];
    let after = mass[t.iter().position(|x| *x >= attach.time + 0.1).unwrap()];
    assert!((after - before - attach.mass).abs() < 1e-12);
    assert!((mass[mass.len() - 1] - cfg.plant.mass).abs() < 1e-12);
}

#[test]
fn servo_is_rate_limited() {
    let cfg = bundled("hover_morph").unwrap();
    let out = simulate(&cfg).unwrap();
    let alpha = out.log.series("alpha").unwrap();
    let max_step = cfg.servo_rate * cfg.geometry.servo_gain * cfg.timing.control_dt;
    for w in alpha.windows(2) {
        assert!((w[1] - w[0]).abs() <= max_step + 1e-12);
    }
    let top = alpha.iter().cloned().fold(0.0, f64::max);
    assert!((top - cfg.geometry.max_fold).abs() < 1e-9);
}

#[test]
fn observer_on_beats_off_in_compare() {
    let on = bundled("hover_morph").unwrap();
    let off = morphquad::harness::ScenarioConfig { observer: false, ..on.clone() };
    let runs = run_batch(&[on, off], Execution::default());
    let (a, b) = (runs[0].as_ref().unwrap(), runs[1].as_ref().unwrap());
    let c = compare_logs(&a.log, &b.log, 0.02).unwrap();
    for r in c.rms_ratio {
        assert!(r < 1.0, "{r}");
    }
    let same = compare_logs(&a.log, &a.log, 0.02).unwrap();
    assert_eq!(same.rms_ratio, [1.0; 3]);
    assert_eq!(same.max_error_ratio, 1.0);
}

#[test]
fn sequential_and_parallel_batches_agree() {
    let cfg = bundled("circle_morph").unwrap();
    let seeds = [3, 4, 5, 6];
    let a = seed_batch(&cfg, &seeds, Execution::Sequential);
    let b = seed_batch(&cfg, &seeds, Execution::Parallel);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.as_ref().unwrap(), y.as_ref().unwrap());
    }
}

#[test]
fn sweep_runs_every_bundled_file() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios");
    let out = tempfile::tempdir().unwrap();
    let entries = sweep_dir(dir, out.path(), Execution::default(), |c| c.duration = c.duration.min(2.0)).unwrap();
    assert_eq!(entries.len(), 4);
    for e in &entries {
        assert!(e.result.is_ok(), "{:?}", e);
    }
    assert!(out.path().join("gap_pass.csv").exists());
}

#[test]
fn bundled_files_match_embedded_copies() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios");
    for name in morphquad::harness::bundled_names() {
        let from_file = load_config(format!("{dir}/{name}.toml")).unwrap();
        assert_eq!(from_file, bundled(name).unwrap());
    }
}

#[test]
fn divergence_reports_tick() {
    // A 40 m drop in half a second asks for negative thrust.
    let src = r#"
name = "plunge"
duration = "2 s"
[trajectory]
kind = "waypoints"
points = [
  { time = "0 s", position = ["0 m", "0 m", "50 m"] },
  { time = "0.5 s", position = ["0 m", "0 m", "10 m"] },
]
[disturbance]
enabled = false
"#;
    match simulate(&parse_config(src).unwrap()) {
        Err(Error::Divergence { tick, .. }) => assert!(tick > 0 && tick < 250),
        other => panic!("expected divergence, got {:?}", other.map(|o| o.metrics)),
    }
}

#[test]
fn gap_transit_clears_walls_only_when_folded() {
    let folded = bundled("gap_pass").unwrap();
    let out = simulate(&folded).unwrap();
    let transit = out.diagnostics.gap.unwrap();
    assert!(transit.ticks_inside > 0);
    assert!(transit.min_margin > folded.gap.unwrap().margin, "{transit:?}");
    assert!((transit.alpha_at_min - folded.geometry.max_fold).abs() < 1e-9);

    let mut open = folded.clone();
    open.morph.clear();
    let out = simulate(&open).unwrap();
    assert!(out.diagnostics.gap.unwrap().min_margin < 0.03);
}

#[test]
fn quiet_disturbance_gives_zero_fd_column() {
    let mut cfg = bundled("circle_morph").unwrap();
    cfg.disturbance = DisturbanceParams::quiet();
    cfg.duration = 1.0;
    let out = simulate(&cfg).unwrap();
    assert!(out.log.series("fd_x").unwrap().iter().all(|x| *x == 0.0));
}
