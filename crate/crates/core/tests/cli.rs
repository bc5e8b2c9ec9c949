use std::fs;
use std::path::Path;
use std::process::Command;

fn sfr(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_sfr"))
        .args(args)
        .output()
        .expect("run sfr")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("experiment.toml");
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const SMALL: &str = r#"
seed = 5
trials_per_point = 2
sweep = [0, 12]
snr_db = 20.0
solvers = ["sparse-l1", "least-squares", "stretch-idft"]

[radar]
l_bins = 4

[target]
kind = "synthetic-sparse"
n_scatterers = 5
"#;

fn without_wall_time(csv: &str) -> Vec<String> {
    csv.lines()
        .map(|l| l.rsplit_once(',').unwrap().0.to_owned())
        .collect()
}

#[test]
fn selftest_passes() {
    let out = sfr(&["selftest"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert!(stdout.contains("[PASS]") && !stdout.contains("[FAIL]"));
}

#[test]
fn sweep_is_reproducible_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let mut tables = Vec::new();
    for (run, threads) in [("a", "1"), ("b", "0")] {
        let out_dir = dir.path().join(run);
        let out = Command::new(env!("CARGO_BIN_EXE_sfr"))
            .args(["sweep", "--config", &config, "--out", out_dir.to_str().unwrap()])
            .env("SFR_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        tables.push(fs::read_to_string(out_dir.join("trials.csv")).unwrap());
    }
    assert_eq!(tables[0].lines().count(), 1 + 2 * 2 * 3);
    assert_eq!(without_wall_time(&tables[0]), without_wall_time(&tables[1]));
}

#[test]
fn seed_flag_changes_draws() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let mut hashes = Vec::new();
    for seed in ["5", "6"] {
        let out_dir = dir.path().join(seed);
        let out = sfr(&["sweep", "--config", &config, "--seed", seed, "--method", "least-squares", "--out", out_dir.to_str().unwrap()]);
        assert!(out.status.success());
        hashes.push(fs::read_to_string(out_dir.join("trials.csv")).unwrap());
    }
    assert_ne!(without_wall_time(&hashes[0]), without_wall_time(&hashes[1]));
}

#[test]
fn simulate_then_recover() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &SMALL.replace("sweep = [0, 12]", "sweep = [0]"));
    let sim_dir = dir.path().join("sim");
    let out = sfr(&["simulate", "--config", &config, "--out", sim_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["truth.csv", "sparse-l1.csv", "least-squares.csv", "stretch-idft.csv", "trm.sfrtrm"] {
        assert!(sim_dir.join(name).exists(), "{name}");
    }
    let truth = fs::read_to_string(sim_dir.join("truth.csv")).unwrap();
    assert_eq!(truth.lines().count(), 32 * 4 + 1);

    let rec_dir = dir.path().join("rec");
    let out = sfr(&[
        "recover",
        "--config",
        &config,
        "--trm",
        sim_dir.join("trm.sfrtrm").to_str().unwrap(),
        "--method",
        "least-squares",
        "--out",
        rec_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        fs::read_to_string(rec_dir.join("least-squares.csv")).unwrap(),
        fs::read_to_string(sim_dir.join("least-squares.csv")).unwrap()
    );
}

#[test]
fn recover_reports_dimension_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let trm = dir.path().join("bad.sfrtrm");
    let mut text = format!("SFRTRM v1 M=32 S=18 dt={:e} order=row-major\n", 1.0 / 24.0e6);
    for _ in 0..(32 * 18 - 1) {
        text.push_str("0,0\n");
    }
    fs::write(&trm, text).unwrap();
    let out = sfr(&["recover", "--trm", trm.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("expected 576") && stderr.contains("found 575"), "{stderr}");
}

#[test]
fn unknown_config_key_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "seed = 1\ntrails_per_point = 3\n");
    let out = sfr(&["sweep", "--config", &config, "--out", dir.path().to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("trails_per_point"));
}
