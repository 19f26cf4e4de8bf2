use graphfilt::config::ExperimentConfig;
use graphfilt::dataset::{
    ingest_temperature_csv, prepare_reconstruction, reconstruct_experiment, synthetic_dataset,
    ReconstructionSettings, SamplingPlan, SyntheticSpec,
};
use graphfilt::presets;
use graphfilt_core::adapt::Adaptation;
use graphfilt_core::clustering::ClusterParams;

#[test]
fn small_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let readings = dir.path().join("readings.csv");
    let coords = dir.path().join("coords.csv");
    let body: String = (0..5)
        .map(|i| format!("{},{},{}\n", i as f64 * 0.5, 10.0 + i as f64, -3.25))
        .collect();
    std::fs::write(&readings, format!("s1,s2,s3\n{body}")).unwrap();
    std::fs::write(&coords, "0,0\n1,0\n0,1\n").unwrap();
    let ds = ingest_temperature_csv(&readings, &coords).unwrap();
    assert_eq!((ds.n_hours(), ds.n_stations()), (5, 3));
    assert_eq!(ds.readings()[(4, 1)], 14.0);
    assert_eq!(ds.coordinates()[2], [0.0, 1.0]);
    assert!(!ds.is_canonical());
}

#[test]
fn coordinate_count_mismatch_names_both() {
    let dir = tempfile::tempdir().unwrap();
    let readings = dir.path().join("readings.csv");
    let coords = dir.path().join("coords.csv");
    std::fs::write(&readings, "1,2,3,4\n5,6,7,8\n").unwrap();
    std::fs::write(&coords, "0,0\n1,0\n0,1\n").unwrap();
    let msg = ingest_temperature_csv(&readings, &coords).unwrap_err().to_string();
    assert!(msg.contains('3') && msg.contains('4'), "{msg}");
}

#[test]
fn missing_reading_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let readings = dir.path().join("readings.csv");
    let coords = dir.path().join("coords.csv");
    std::fs::write(&readings, "1,2,3\n4,5,\n").unwrap();
    std::fs::write(&coords, "0,0\n1,0\n0,1\n").unwrap();
    let msg = ingest_temperature_csv(&readings, &coords).unwrap_err().to_string();
    assert!(msg.contains("row 2") && msg.contains("column 3"), "{msg}");
}

fn settings() -> ReconstructionSettings {
    ReconstructionSettings {
        order: 4,
        adaptation: Adaptation::Preconditioned { epsilon: 0.01 },
        mu: 1e-4,
        multitask: true,
        clustering: ClusterParams::default(),
        train: 1500,
    }
}

#[test]
fn synthetic_reconstruction_is_accurate() {
    let spec = SyntheticSpec { stations: 40, hours: 2000, sampled: 16, ..Default::default() };
    let (ds, plan) = synthetic_dataset(&spec, 2).unwrap();
    let rec = reconstruct_experiment(&ds, &plan, &settings()).unwrap();
    assert!(rec.nmse < 0.05, "nmse {}", rec.nmse);
    assert!(rec.clusters.is_some());
}

#[test]
fn all_sampled_leaves_nothing_to_score() {
    let spec = SyntheticSpec { stations: 30, hours: 300, sampled: 12, ..Default::default() };
    let (ds, _) = synthetic_dataset(&spec, 2).unwrap();
    let plan = SamplingPlan::fixed(vec![true; 30]);
    let set = ReconstructionSettings { train: 200, ..settings() };
    assert!(reconstruct_experiment(&ds, &plan, &set).is_err());
}

#[test]
fn explicit_sampling_needs_files() {
    let mut cfg: ExperimentConfig = presets::preset("table1").unwrap().variants[1].1.clone();
    cfg.dataset.as_mut().unwrap().sampled = vec![0, 1, 2];
    assert_eq!(prepare_reconstruction(&cfg, 1).unwrap_err().exit_code(), 2);
}
