use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn fastpam(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fastpam")).args(args).current_dir(dir).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn six_points(dir: &Path) {
    fs::write(dir.join("six.csv"), "x\n0\n1\n2\n6\n7\n8\n").unwrap();
}

#[test]
fn cluster_six_points() {
    let dir = TempDir::new().unwrap();
    six_points(dir.path());
    let pam = json(&fastpam(&["cluster", "six.csv", "--k", "2", "--engine", "pam"], dir.path()));
    assert_eq!(pam["medoids"], serde_json::json!([1, 4]));
    assert_eq!(pam["assignment"], serde_json::json!([0, 0, 0, 1, 1, 1]));
    assert_eq!(pam["td"], 4.0);
    assert_eq!(pam["config"]["init"], "build");
    assert!(pam["config"]["rng"].as_str().unwrap().contains("ChaCha8"));

    let fast = json(&fastpam(&["cluster", "six.csv", "--k", "2", "--engine", "fastpam1"], dir.path()));
    for field in ["medoids", "assignment", "td"] {
        assert_eq!(pam[field], fast[field], "{field}");
    }
    assert_eq!(pam["stats"]["swaps_executed"], fast["stats"]["swaps_executed"]);
}

#[test]
fn every_point_a_medoid() {
    let dir = TempDir::new().unwrap();
    six_points(dir.path());
    let out = json(&fastpam(&["cluster", "six.csv", "--k", "6"], dir.path()));
    assert_eq!(out["td"], 0.0);
}

#[test]
fn bad_flag_combinations_exit_2() {
    let dir = TempDir::new().unwrap();
    six_points(dir.path());
    let cases: [&[&str]; 6] = [
        &["cluster", "six.csv", "--k", "2", "--engine", "pam", "--tau", "1"],
        &["cluster", "six.csv", "--k", "2", "--engine", "fastpam2", "--sample-size", "4"],
        &["cluster", "six.csv", "--k", "2", "--engine", "clara", "--attempts", "4"],
        &["cluster", "six.csv", "--k", "2", "--engine", "clarans", "--init", "build"],
        &["cluster", "six.csv", "--k", "2", "--engine", "nosuch"],
        &["cluster", "six.csv", "--k", "9"],
    ];
    for args in cases {
        assert_eq!(fastpam(args, dir.path()).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn ragged_csv_reports_line() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("bad.csv"), "1,2\n3,4\n5\n").unwrap();
    let out = fastpam(&["cluster", "bad.csv", "--k", "2"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn generate_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let args = ["generate", "--n", "57", "--clusters", "3", "--dim", "4", "--seed", "9", "--output"];
    let a = fastpam(&[&args[..], &["a.csv"]].concat(), dir.path());
    let b = fastpam(&[&args[..], &["b.csv"]].concat(), dir.path());
    assert!(a.status.success() && b.status.success());
    let text = fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(text, fs::read_to_string(dir.path().join("b.csv")).unwrap());
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with('#') && header.contains("seed=9") && header.contains("ChaCha8"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 57);
    assert!(rows.iter().all(|r| r.split(',').count() == 4));

    let zero = fastpam(&["generate", "--n", "0"], dir.path());
    assert_eq!(zero.status.code(), Some(2));
}

#[test]
fn precomputed_matrix_matches_vectors() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    assert!(fastpam(&["generate", "--n", "80", "--clusters", "4", "--seed", "3", "--output", "g.csv"], d).status.success());
    assert!(fastpam(&["convert-matrix", "g.csv", "--metric", "manhattan", "--output", "g.tri"], d).status.success());
    let vec = json(&fastpam(&["cluster", "g.csv", "--k", "4", "--metric", "manhattan"], d));
    let pre = json(&fastpam(&["cluster", "g.tri", "--k", "4", "--metric", "precomputed"], d));
    assert_eq!(vec["medoids"], pre["medoids"]);
    assert_eq!(vec["td"], pre["td"]);

    fs::write(d.join("sq.csv"), "0,1,2\n1,0,3\n2,3,0\n").unwrap();
    assert!(fastpam(&["convert-matrix", "sq.csv", "--metric", "precomputed", "--output", "sq.tri"], d).status.success());
    assert_eq!(fs::read_to_string(d.join("sq.tri")).unwrap(), "3\n1\n2 3\n");
    fs::write(d.join("asym.csv"), "0,1\n2,0\n").unwrap();
    assert_eq!(fastpam(&["convert-matrix", "asym.csv", "--metric", "precomputed"], d).status.code(), Some(1));
}

#[test]
fn counters_are_reported() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    assert!(fastpam(&["generate", "--n", "60", "--seed", "1", "--output", "g.csv"], d).status.success());
    let counted = json(&fastpam(&["cluster", "g.csv", "--k", "3", "--count-lookups"], d));
    assert!(counted["stats"]["lookups"].as_u64().unwrap() > 0);
    let free = json(&fastpam(&["cluster", "g.csv", "--k", "3", "--matrix-free"], d));
    assert!(free["stats"]["distance_evals"].as_u64().unwrap() > 0);
    assert_eq!(counted["medoids"], free["medoids"]);
}

const SPEC: &str = r#"{
  "dataset": {"gaussian_mixture": {"clusters": 4, "dim": 3, "spread": 0.5, "n": 120, "seed": 2}},
  "algorithms": [{"engine": "pam"}, {"engine": "fastpam1"}, {"engine": "fastpam2", "init": "lab", "tau": 1}],
  "k_values": [3, 4],
  "repeats": 2,
  "seed_base": 100,
  "count_lookups": true
}"#;

fn read_csv(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(Result::unwrap).collect()
}

#[test]
fn bench_writes_records_and_summary() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    fs::write(d.join("spec.json"), SPEC).unwrap();
    let out = fastpam(&["bench", "spec.json", "--output", "run1"], d);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let records = read_csv(&d.join("run1/records.csv"));
    assert_eq!(records.len(), 3 * 2 * 2);
    let seeds: Vec<&str> = records.iter().take(2).map(|r| &r[6]).collect();
    assert_eq!(seeds, ["100", "101"]);
    let summary = read_csv(&d.join("run1/summary.csv"));
    assert_eq!(summary.len(), 6);
    let header = csv::Reader::from_path(d.join("run1/summary.csv")).unwrap().headers().unwrap().clone();
    let speedup = header.iter().position(|h| h == "speedup_vs_pam").unwrap();
    assert_eq!(&summary[0][speedup], "1");
    assert!(summary[1][speedup].parse::<f64>().unwrap() > 1.0);

    // TD and counters are deterministic; only timings may differ
    assert!(fastpam(&["bench", "spec.json", "--output", "run2"], d).status.success());
    let again = read_csv(&d.join("run2/records.csv"));
    for (a, b) in records.iter().zip(&again) {
        assert_eq!(a.iter().take(17).collect::<Vec<_>>(), b.iter().take(17).collect::<Vec<_>>());
    }
}

#[test]
fn bench_failed_combo_keeps_going() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let spec = SPEC.replace("[3, 4]", "[3, 500]");
    fs::write(d.join("spec.json"), spec).unwrap();
    let out = fastpam(&["bench", "spec.json", "--output", "o"], d);
    assert_eq!(out.status.code(), Some(1));
    let records = read_csv(&d.join("o/records.csv"));
    assert_eq!(records.len(), 12);
    assert_eq!(records.iter().filter(|r| &r[7] == "failed").count(), 6);
    assert_eq!(records.iter().filter(|r| &r[7] == "ok").count(), 6);

    fs::write(d.join("bad.json"), SPEC.replace("\"pam\"}", "\"pam\", \"tau\": 1}")).unwrap();
    assert_eq!(fastpam(&["bench", "bad.json"], d).status.code(), Some(2));
}
