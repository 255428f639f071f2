//! End-to-end tests of the `qmchi` binary.

use std::path::Path;
use std::process::{Command, Output};

fn qmchi(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmchi")).args(args).current_dir(dir).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn data_rows(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

#[test]
fn construct_r_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = qmchi(&["construct", "--kind", "R", "--n", "127", "--d", "4", "--alpha", "2", "--gamma", "pow:1:2", "--no-cache"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("record R 127 4 2 pow:1:2 1 35 77 60\n"), "{text}");
    let value: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("criterion R = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((value - 0.0014273208390515471).abs() < 1e-15);
}

#[test]
fn construct_cache_hit() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["construct", "--kind", "S", "--n", "61", "--d", "3"];
    let first = stdout(&qmchi(&args, dir.path()));
    let second = stdout(&qmchi(&args, dir.path()));
    assert!(first.contains("status computed"));
    assert!(second.contains("status cached"));
    assert_eq!(first.lines().next(), second.lines().next());
    assert!(dir.path().join("qmchi-vectors.txt").exists());
}

#[test]
fn construct_recon_success_and_impossible() {
    let dir = tempfile::tempdir().unwrap();
    let ok = qmchi(&["construct", "--kind", "recon", "--n", "127", "--threshold", "64", "--no-cache"], dir.path());
    assert_eq!(ok.status.code(), Some(0));
    let text = stdout(&ok);
    assert!(text.contains("card_I 11\n") && text.contains("reconstruction success"), "{text}");

    let too_big = qmchi(&["construct", "--kind", "recon", "--n", "31", "--threshold", "1e5", "--no-cache"], dir.path());
    assert_eq!(too_big.status.code(), Some(3));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["construct", "--n", "128", "--no-cache"],
        vec!["construct", "--kind", "Q", "--no-cache"],
        vec!["timing", "--reps", "2"],
        vec!["denoise", "--preset", "fig9"],
    ] {
        let out = qmchi(&args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));
    }
}

#[test]
fn fibonacci_points() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&qmchi(&["points", "--format", "fraction"], dir.path()));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 89);
    assert_eq!(rows[0], "0/89,0/89");
    assert_eq!(rows[1], "1/89,55/89");
    assert_eq!(rows[2], "2/89,21/89");
}

#[test]
fn fibonacci_polynomial_points() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&qmchi(&["points", "--lattice", "fibonacci-poly"], dir.path()));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 128);
    assert_eq!(rows[0], "0,0");
    let mut firsts: Vec<f64> = rows.iter().map(|r| r.split(',').next().unwrap().parse().unwrap()).collect();
    firsts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for (k, x) in firsts.iter().enumerate() {
        assert_eq!(*x, k as f64 / 128.0);
    }
}

#[test]
fn header_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    let out = qmchi(&["points", "--lattice", "rank1", "--n", "13", "--z", "1,5", "--out", first.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let replay = qmchi(&["points", "--config", first.to_str().unwrap(), "--out", second.to_str().unwrap()], dir.path());
    assert_eq!(replay.status.code(), Some(0));
    let a = std::fs::read(&first).unwrap();
    let b = std::fs::read(&second).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.lines().any(|l| l.starts_with("# config_hash=") && l.len() == "# config_hash=".len() + 64));
}

#[test]
fn convergence_writes_csv_and_script() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("conv.csv");
    let out = qmchi(&["convergence", "--ladder", "127,251", "--out", csv.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.contains("N,card_I,eta,l2_error,status\n"));
    assert_eq!(data_rows(&text).len(), 2);
    assert!(dir.path().join("conv.csv.gp").exists());
}
