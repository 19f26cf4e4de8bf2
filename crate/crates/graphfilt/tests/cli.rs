use std::path::Path;
use std::process::Command;

fn graphfilt(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_graphfilt")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    )
}

fn emit(dir: &Path, preset: &str) -> Vec<String> {
    let out = dir.join(preset);
    let (code, stdout) = graphfilt(&["preset", preset, "--emit-config", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    stdout.lines().map(str::to_string).collect()
}

#[test]
fn simulate_and_theory_write_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let configs = emit(dir.path(), "fig2a");
    let plms = configs.iter().find(|c| c.ends_with("plms.toml")).unwrap();
    let out = dir.path().join("sim");
    let o = out.to_str().unwrap();
    let (code, _) = graphfilt(&["simulate", plms, "--runs", "2", "--iters", "50", "--seed", "4", "--out", o]);
    assert_eq!(code, 0);
    let msd = std::fs::read_to_string(out.join("msd.csv")).unwrap();
    assert!(msd.starts_with("i,msd,msd_db,theory,theory_db\n"));
    assert_eq!(msd.lines().count(), 52);

    let (code, _) = graphfilt(&["theory", plms, "--iters", "50", "--out", o]);
    assert_eq!(code, 0);
    assert!(out.join("theory.csv").exists());
}

#[test]
fn cluster_writes_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let configs = emit(dir.path(), "fig5");
    let out = dir.path().join("c");
    let (code, _) = graphfilt(&["cluster", &configs[0], "--runs", "1", "--iters", "30", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let e = graphfilt::io::read_cluster_csv(&out.join("clusters_30.csv")).unwrap();
    assert_eq!(e.nrows(), 60);
}

#[test]
fn reconstruct_writes_nmse() {
    let dir = tempfile::tempdir().unwrap();
    let configs = emit(dir.path(), "table1");
    let plms = configs.iter().find(|c| c.ends_with("multitask-plms.toml")).unwrap();
    let out = dir.path().join("r");
    let (code, stdout) = graphfilt(&["reconstruct", plms, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("nmse "));
    assert!(std::fs::read_to_string(out.join("nmse.txt")).unwrap().starts_with("nmse "));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(graphfilt(&["simulate", "/no/such/config.toml"]).0, 2);
    assert_eq!(graphfilt(&["preset", "nonexistent"]).0, 2);
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[run]\nruns = 0\n").unwrap();
    assert_eq!(graphfilt(&["simulate", bad.to_str().unwrap()]).0, 2);

    let configs = emit(dir.path(), "fig2a");
    let lms = configs.iter().find(|c| c.ends_with("/lms.toml")).unwrap();
    let text = std::fs::read_to_string(lms).unwrap().replace("mu = 0.08", "mu = 500.0");
    std::fs::write(lms, text).unwrap();
    let out = dir.path().join("d");
    let (code, _) = graphfilt(&["simulate", lms, "--runs", "2", "--iters", "300", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 3);
}
