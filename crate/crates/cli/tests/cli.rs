use std::path::Path;
use std::process::{Command, Output};

use fracplap::harness::{SweepReport, CSV_HEADER};

const SMALL: [&str; 4] = ["--n", "32", "--s-grid", "0.8,0.9,0.99"];

fn fracplap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracplap")).args(args).output().unwrap()
}

fn with_small<'a>(args: &[&'a str]) -> Vec<&'a str> {
    args.iter().copied().chain(SMALL).collect()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn eigen_csv_to_stdout() {
    let out = fracplap(&with_small(&["eigen"]));
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 5);
    assert!(lines[4].starts_with("1.0000000000000000e0,"));
    assert!(stderr(&out).contains("PASS [eigen] local eigenvalue"));
}

#[test]
fn ground_state_json_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gs.json");
    let out = fracplap(&with_small(&["ground-state", "--format", "json", "--out", path.to_str().unwrap()]));
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let report = SweepReport::from_json(&text).unwrap();
    assert_eq!(report.q, Some(4.0));
    assert_eq!(report.to_json().unwrap(), text);
}

#[test]
fn sweep_writes_one_file_per_mode() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.csv");
    let out = fracplap(&with_small(&["sweep", "--out", path.to_str().unwrap()]));
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    for mode in ["eigen", "ground-state", "gamma-check"] {
        let text = std::fs::read_to_string(dir.path().join(format!("run-{mode}.csv"))).unwrap();
        assert!(text.starts_with(CSV_HEADER));
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.txt");
    std::fs::write(&config, "# small run\nn = 16\ns-grid = 0.8,0.9\nformat = json\n").unwrap();
    let out = fracplap(&["gamma-check", "--config", config.to_str().unwrap(), "--n", "24"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = SweepReport::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(report.num_elements, 24);
    assert_eq!(report.records.len(), 2);
}

#[test]
fn failed_check_exits_two() {
    // the gap check at s = 0.99 cannot hold on such a coarse mesh with p = 4
    let out = fracplap(&["gamma-check", "--n", "4", "--p", "4", "--s-grid", "0.2,0.99"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("FAIL"));
}

#[test]
fn errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.txt");
    std::fs::write(&config, "bogus = 1\n").unwrap();
    let cases: Vec<Vec<String>> = vec![
        vec!["eigen".into(), "--config".into(), config.display().to_string()],
        vec!["eigen".into(), "--config".into(), "/nonexistent/c.txt".into()],
        vec!["eigen".into(), "--s-grid".into(), "0.9,0.5".into()],
        vec!["ground-state".into(), "--q".into(), "1.5".into()],
        vec!["eigen".into(), "--n".into(), "8".into(), "--out".into(), "/nonexistent/dir/r.csv".into()],
        vec!["eigen".into(), "--unknown".into()],
    ];
    for args in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = fracplap(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn solver_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.txt");
    std::fs::write(&config, "max-iterations = 1\n").unwrap();
    let out = fracplap(&with_small(&["eigen", "--config", config.to_str().unwrap()]));
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("s = 0.8"), "{}", stderr(&out));
}

#[test]
fn repeated_runs_are_identical() {
    let a = fracplap(&with_small(&["sweep", "--format", "json"]));
    let b = fracplap(&with_small(&["sweep", "--format", "json"]));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(!Path::new("run-eigen.json").exists());
}

#[test]
fn help_exits_zero() {
    let out = fracplap(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for sub in ["eigen", "ground-state", "gamma-check", "sweep"] {
        assert!(text.contains(sub));
    }
}
