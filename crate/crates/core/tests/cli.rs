use std::process::{Command, Output};

use rumour::cli::{read_sweep_csv, RunRecord, EXIT_FAILURE, EXIT_OK, EXIT_USAGE};

fn rumour(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rumour")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn simulate_is_byte_identical_across_runs() {
    let args = ["simulate", "--n", "5000", "--k", "2", "--reps", "50", "--seed", "99", "--engine", "exact"];
    let a = rumour(&args);
    let b = rumour(&args);
    assert_eq!(code(&a), EXIT_OK);
    assert_eq!(a.stdout, b.stdout);
    let recs: Vec<RunRecord> =
        String::from_utf8(a.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(recs.len(), 50);
    for (i, r) in recs.iter().enumerate() {
        assert_eq!(r.replicate_index, i as u64);
        assert_eq!(r.fraction, r.terminal_susceptibles as f64 / r.n as f64);
    }
}

#[test]
fn simulate_summary_reports_conditioned_mean() {
    let o = rumour(&["simulate", "--n", "100000", "--k", "1", "--reps", "200", "--seed", "5"]);
    assert_eq!(code(&o), EXIT_OK);
    let err = String::from_utf8(o.stderr).unwrap();
    let cond: f64 = err
        .split_whitespace()
        .find_map(|w| w.strip_prefix("conditioned_mean="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((cond - 0.203).abs() < 0.01, "{err}");
}

#[test]
fn csv_and_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    let tr = dir.path().join("tr.jsonl");
    let o = rumour(&[
        "simulate", "--n", "30", "--k", "1", "--reps", "3", "--seed", "1", "--engine", "walk", "--format", "csv",
        "--trajectories", tr.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), EXIT_OK);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let recs: Vec<RunRecord> = rdr.deserialize().map(Result::unwrap).collect();
    assert_eq!(recs.len(), 3);
    let lines: Vec<serde_json::Value> =
        std::fs::read_to_string(&tr).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    for (rec, line) in recs.iter().zip(&lines) {
        let states = line["states"].as_array().unwrap();
        assert_eq!(states.len() as u64, rec.terminal_time + 1);
        let last = &states[states.len() - 1];
        assert_eq!(last[1], 0, "attempt counter is zero at termination");
    }
    let geo = rumour(&["simulate", "--n", "30", "--k", "1", "--engine", "geometric", "--trajectories", "x.jsonl"]);
    assert_eq!(code(&geo), EXIT_USAGE);
}

#[test]
fn limit_command() {
    let o = rumour(&["limit", "--k", "10"]);
    assert_eq!(code(&o), EXIT_OK);
    let text = String::from_utf8(o.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "10");
    let ratio: f64 = row[4].parse().unwrap();
    assert!((ratio - 1.0).abs() < 1e-3);
    assert_eq!(code(&rumour(&["limit", "--k", "0"])), EXIT_USAGE);
}

#[test]
fn verify_suites_pass() {
    for args in [
        vec!["verify", "--suite", "dp", "--n", "8", "--k", "2", "--seed", "3"],
        vec!["verify", "--suite", "tailbound"],
        vec!["verify", "--suite", "coupling", "--n", "50", "--k", "1", "--reps", "1000", "--seed", "3"],
        vec!["verify", "--suite", "conservation", "--seed", "3"],
        vec!["verify", "--suite", "ost", "--n", "300", "--k", "1", "--reps", "20000", "--seed", "3"],
        vec!["verify", "--suite", "clusters", "--n", "20000", "--reps", "300", "--seed", "3"],
    ] {
        let o = rumour(&args);
        assert_eq!(code(&o), EXIT_OK, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let line: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(line["passed"], true);
    }
}

#[test]
fn verify_reports_failure_and_usage() {
    // far too few replicates to separate the clusters at this size
    let o = rumour(&["verify", "--suite", "clusters", "--n", "50", "--reps", "2000", "--seed", "1"]);
    assert_eq!(code(&o), EXIT_FAILURE, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&rumour(&["verify", "--suite", "nope"])), EXIT_USAGE);
    assert_eq!(code(&rumour(&["verify", "--suite", "variance", "--n", "100", "--seed", "1"])), EXIT_USAGE);
    assert_eq!(code(&rumour(&["verify", "--suite", "dp", "--n", "100000", "--seed", "1"])), EXIT_USAGE);
}

#[test]
fn sweep_output_feeds_cluster_verification() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = rumour(&[
        "sweep", "--k", "1", "--n-list", "1e3,1e4,1e5", "--reps", "200", "--seed", "2", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), EXIT_OK, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_sweep_csv(std::fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![1000, 10_000, 100_000]);
    let v = rumour(&["verify", "--suite", "clusters", "--from", out.to_str().unwrap(), "--seed", "0"]);
    assert_eq!(code(&v), EXIT_OK, "{}", String::from_utf8_lossy(&v.stderr));
}

#[test]
fn sweep_errors() {
    assert_eq!(code(&rumour(&["sweep", "--n-list", ""])), EXIT_USAGE);
    let o = rumour(&["sweep", "--n-list", "100", "--reps", "5", "--seed", "1", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(code(&o), EXIT_FAILURE);
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn single_individual_population() {
    let o = rumour(&["simulate", "--n", "1", "--k", "3", "--reps", "2", "--seed", "1"]);
    assert_eq!(code(&o), EXIT_OK);
    for line in String::from_utf8(o.stdout).unwrap().lines() {
        let r: RunRecord = serde_json::from_str(line).unwrap();
        assert_eq!((r.terminal_time, r.terminal_susceptibles), (3, 0));
    }
}
