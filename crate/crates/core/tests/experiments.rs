use qwalk_core::experiments::{read_config, read_manifest, manifest_path, OutputFormat, TopologySpec};
use qwalk_core::{preset, run_experiment, Execution, ExperimentConfig, Manifest, Mode, NoiseSpec, PresetName};

#[test]
fn manifest_round_trips_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        noise: vec![NoiseSpec::depolarizing(0.97), NoiseSpec::depolarizing(0.95).with_tunneling(0.9)],
        trajectories: 64,
        seed: Some(3),
        classical_reference: true,
        ..ExperimentConfig::new("rt", Mode::Walk, vec![10, 20])
    };
    let first = run_experiment(&cfg, Execution::Parallel).unwrap().write(&dir.path().join("a")).unwrap();
    let text = std::fs::read_to_string(manifest_path(&dir.path().join("a"))).unwrap();
    let parsed: Manifest = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed, first);
    assert_eq!(read_manifest(&manifest_path(&dir.path().join("a"))).unwrap(), first);

    let again = read_config(&manifest_path(&dir.path().join("a"))).unwrap();
    assert_eq!(again, cfg);
    let second = run_experiment(&again, Execution::Sequential).unwrap().write(&dir.path().join("b")).unwrap();
    assert_eq!(first.files.len(), 6);
    for (f1, f2) in first.files.iter().zip(&second.files) {
        assert_eq!(f1.file, f2.file);
        let a = std::fs::read(dir.path().join("a").join(&f1.file)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(&f2.file)).unwrap();
        assert_eq!(a, b, "{}", f1.file);
    }
}

#[test]
fn csv_headers_and_json_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&ExperimentConfig { steps: vec![30], ..preset(PresetName::Fig4) }, Execution::Parallel).unwrap();
    let m = out.write(dir.path()).unwrap();
    let names: Vec<&str> = m.files.iter().map(|f| f.file.as_str()).collect();
    assert_eq!(names, ["bounded_ideal.csv", "bounded_p0.99.csv", "bounded_classical.csv"]);
    let text = std::fs::read_to_string(dir.path().join("bounded_ideal.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("step,cumulative_absorbed"));
    assert_eq!(lines.count(), 30);

    let cfg = ExperimentConfig {
        format: OutputFormat::Json,
        topology: TopologySpec::Circle { sites: 6 },
        ..ExperimentConfig::new("json", Mode::Walk, vec![5])
    };
    let m = run_experiment(&cfg, Execution::Parallel).unwrap().write(dir.path()).unwrap();
    assert_eq!(m.files[0].file, "walk_ideal_n5.json");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("walk_ideal_n5.json")).unwrap()).unwrap();
    assert_eq!(v["columns"], serde_json::json!(["k", "probability"]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 6);
    let total: f64 = v["rows"].as_array().unwrap().iter().map(|r| r[1].as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn distribution_csv_matches_the_exact_walk() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::new("exact", Mode::Walk, vec![3]);
    run_experiment(&cfg, Execution::Parallel).unwrap().write(dir.path()).unwrap();
    let mut r = csv::Reader::from_path(dir.path().join("walk_ideal_n3.csv")).unwrap();
    assert_eq!(r.headers().unwrap(), vec!["k", "probability"]);
    let rows: Vec<(i64, f64)> = r.deserialize().map(Result::unwrap).collect();
    let nonzero: Vec<(i64, f64)> = rows.into_iter().filter(|(_, p)| *p > 0.0).collect();
    let expected = [(-3, 0.125), (-1, 0.375), (1, 0.375), (3, 0.125)];
    assert_eq!(nonzero.len(), 4);
    for ((k, p), (ek, ep)) in nonzero.iter().zip(expected) {
        assert_eq!(*k, ek);
        assert!((p - ep).abs() < 1e-15);
    }
}

#[test]
fn sampling_is_seeded() {
    let cfg = ExperimentConfig {
        shots: 2000,
        seed: Some(11),
        ..ExperimentConfig::new("s", Mode::Sample, vec![40])
    };
    let a = run_experiment(&cfg, Execution::Parallel).unwrap();
    let b = run_experiment(&cfg, Execution::Sequential).unwrap();
    assert_eq!(a.curves, b.curves);
    let d = a.curves[0].distribution().unwrap();
    assert!((d.total() - 1.0).abs() < 1e-12);
    assert!(d.probs.iter().all(|p| (p * 2000.0).fract() < 1e-9 || (p * 2000.0).fract() > 1.0 - 1e-9));

    let other = run_experiment(&ExperimentConfig { seed: Some(12), ..cfg }, Execution::Parallel).unwrap();
    assert_ne!(a.curves, other.curves);
}

#[test]
fn classical_mode_with_and_without_barriers() {
    let free = run_experiment(&ExperimentConfig::new("c", Mode::Classical, vec![10, 20]), Execution::Parallel).unwrap();
    assert_eq!(free.curves.len(), 2);
    assert!((free.curves[1].distribution().unwrap().std_dev() - 20f64.sqrt()).abs() < 1e-12);
    let bounded = run_experiment(
        &ExperimentConfig { barriers: Some(vec![-3, 3]), ..ExperimentConfig::new("cb", Mode::Classical, vec![200]) },
        Execution::Parallel,
    )
    .unwrap();
    let series = bounded.curves[0].absorption().unwrap();
    assert!(series.last().unwrap().cumulative > 0.999);
}
