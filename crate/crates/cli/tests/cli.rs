use std::path::Path;
use std::process::{Command, Output};

fn scatter2d(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scatter2d"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn synthesize_writes_noise_header_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = scatter2d(&["synthesize", "--N", "16", "--noise", "0.05", "--seed", "7", "--out", "s"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let data = read(dir.path().join("s/data.csv"));
    assert!(data.lines().nth(1).unwrap().ends_with("noise=0.05 seed=7"));
    assert!(read(dir.path().join("s/config.txt")).contains("seed = 7\n"));
}

#[test]
fn config_echo_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = scatter2d(
        &["synthesize", "--N", "16", "--scenario", "fixed-angle", "--theta0", "0.3", "--noise", "0.02", "--seed", "3", "--out", "a"],
        dir.path(),
    );
    assert!(first.status.success());
    let again = scatter2d(&["synthesize", "--config", "a/config.txt", "--out", "b"], dir.path());
    assert!(again.status.success());
    assert_eq!(read(dir.path().join("a/data.csv")), read(dir.path().join("b/data.csv")));
}

#[test]
fn full_data_writes_one_file_per_angle_and_born_averages_them() {
    let dir = tempfile::tempdir().unwrap();
    let out = scatter2d(&["synthesize", "--N", "16", "--scenario", "full-data", "--angles", "3", "--out", "f"], dir.path());
    assert!(out.status.success());
    for i in 0..3 {
        assert!(dir.path().join(format!("f/data_{i}.csv")).exists());
    }
    let born = scatter2d(
        &["born", "--data", "f/data_0.csv", "--data", "f/data_1.csv", "--data", "f/data_2.csv", "--out", "b"],
        dir.path(),
    );
    assert!(born.status.success(), "{}", String::from_utf8_lossy(&born.stderr));
    assert!(dir.path().join("b/born.csv").exists());
}

#[test]
fn iterate_writes_every_iterate_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = scatter2d(&["iterate", "--N", "16", "--scenario", "fixed-energy", "--k0", "20", "--iters", "2", "--out", "i"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for n in 0..=2 {
        assert!(dir.path().join(format!("i/iterate_{n}.csv")).exists());
    }
    let errors = read(dir.path().join("i/errors.csv"));
    let values: Vec<f64> = errors.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(values.len(), 3);
    assert!(values[2] < values[1] && values[1] < values[0]);
}

#[test]
fn born_of_written_data_matches_reference_file() {
    let dir = tempfile::tempdir().unwrap();
    assert!(scatter2d(&["synthesize", "--N", "16", "--out", "s"], dir.path()).status.success());
    let out = scatter2d(&["born", "--data", "s/data.csv", "--out", "b"], dir.path());
    assert!(out.status.success());
    let with_ref = scatter2d(&["born", "--data", "s/data.csv", "--reference", "b/born.csv", "--out", "c"], dir.path());
    assert!(with_ref.status.success());
    assert_eq!(read(dir.path().join("c/errors.csv")), "n,error\n1,0.0\n");
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["synthesize", "--N", "7"],
        vec!["synthesize", "--scenario", "sideways"],
        vec!["born", "--data", "missing.csv"],
        vec!["frobnicate"],
    ] {
        let out = scatter2d(&args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    std::fs::write(dir.path().join("bad.txt"), "nonsense = 1\n").unwrap();
    assert_eq!(scatter2d(&["synthesize", "--config", "bad.txt"], dir.path()).status.code(), Some(2));
}

#[test]
fn verify_suites_pass() {
    let dir = tempfile::tempdir().unwrap();
    for suite in ["geometry", "special", "solver", "sampling"] {
        let out = scatter2d(&["verify", "--suite", suite], dir.path());
        assert!(out.status.success(), "{suite}: {}", String::from_utf8_lossy(&out.stdout));
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");
    }
}

#[test]
fn sweep_writes_long_form_rate() {
    let dir = tempfile::tempdir().unwrap();
    let out = scatter2d(&["sweep", "--mode", "fixed-energy", "--k", "10,100", "--sizes", "16", "--iters", "2", "--out", "w"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(read(dir.path().join("w/errors.csv")).starts_with("k,N,n,error\n10.0,16,1,"));
    assert!(read(dir.path().join("w/rate.csv")).starts_with("study,param,value\nrate,N=16:exponent,"));
}
