use graphfilt::config::{AlgorithmKind, CombinationKind, ExperimentConfig};
use graphfilt::experiment::Experiment;
use graphfilt::monte_carlo::{run_monte_carlo, Recording};
use graphfilt::{io, presets};

fn small() -> ExperimentConfig {
    let mut cfg = presets::preset("fig5").unwrap().variants[0].1.clone();
    cfg.algorithm.kind = AlgorithmKind::Plms;
    cfg.algorithm.combination = CombinationKind::Learned;
    cfg
}

fn msd_bytes(cfg: &ExperimentConfig, seed: u64, threads: usize) -> Vec<u8> {
    let exp = Experiment::build(cfg, seed).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    let rec = Recording { snapshots: vec![200], trace_nodes: vec![4] };
    let mc = pool.install(|| run_monte_carlo(&exp, 6, 200, seed, &rec).unwrap());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("msd.csv");
    io::write_msd_csv(&path, &mc.mean_msd, None).unwrap();
    let mut bytes = std::fs::read(&path).unwrap();
    let trace = dir.path().join("trace.csv");
    io::write_trace_csv(&trace, 4, exp.order, &mc.traces[0]).unwrap();
    bytes.extend(std::fs::read(&trace).unwrap());
    let clusters = dir.path().join("clusters.csv");
    io::write_cluster_csv(&clusters, &mc.runs[0].snapshots[0].1).unwrap();
    bytes.extend(std::fs::read(&clusters).unwrap());
    bytes
}

#[test]
fn same_seed_same_bytes() {
    let cfg = small();
    assert_eq!(msd_bytes(&cfg, 9, 1), msd_bytes(&cfg, 9, 4));
    assert_eq!(msd_bytes(&cfg, 9, 2), msd_bytes(&cfg, 9, 2));
    assert_ne!(msd_bytes(&cfg, 9, 2), msd_bytes(&cfg, 10, 2));
}

#[test]
fn run_count_prefix_is_stable() {
    // run r gets the same seed whatever the total number of runs
    let exp = Experiment::build(&small(), 3).unwrap();
    let a = run_monte_carlo(&exp, 1, 100, 3, &Recording { snapshots: vec![], trace_nodes: vec![0] }).unwrap();
    let b = run_monte_carlo(&exp, 5, 100, 3, &Recording { snapshots: vec![], trace_nodes: vec![0] }).unwrap();
    assert_eq!(a.traces[0], b.traces[0]);
}
