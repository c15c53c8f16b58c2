use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const WORKLOAD: &str = "n=80,load=0.9,capacity=8,dist=heavy,shape=1.5,scale=50,alloc=uniform:1-8";

fn pcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcs"))
        .arg("-q")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = pcs(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// CSV rows without the leading `#` metadata line.
fn rows(path: &Path) -> Vec<csv::StringRecord> {
    let text = fs::read_to_string(path).unwrap();
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    csv::Reader::from_reader(body.as_bytes())
        .records()
        .map(Result::unwrap)
        .collect()
}

#[test]
fn simulate_fifo_predicts_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    ok(&["simulate", "--synthetic", WORKLOAD, "--seed", "3", "--out", out.to_str().unwrap()]);
    let summary = json(&out.join("summary.json"));
    assert_eq!(summary["summary"]["pred_err"]["p100"], 0.0);
    assert_eq!(summary["summary"]["jobs"], 80);
    assert_eq!(rows(&out.join("jobs.csv")).len(), 80);
}

#[test]
fn huge_class_budget_matches_fifo() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let base = ["simulate", "--synthetic", WORKLOAD, "--restart-overhead", "2"];
    ok(&[&base[..], &["--out", a.to_str().unwrap()]].concat());
    ok(&[&base[..], &["--policy", "pcs", "--pcs-T", "1e9", "--pcs-W", "0", "--out", b.to_str().unwrap()]].concat());
    let strip = |p: &Path| -> Vec<Vec<String>> {
        rows(&p.join("jobs.csv")).iter().map(|r| r.iter().map(str::to_string).collect()).collect()
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn repeated_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        ok(&["simulate", "--synthetic", WORKLOAD, "--policy", "afs", "--out", out.to_str().unwrap()]);
    }
    for file in ["summary.json", "jobs.csv"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file}");
    }
}

#[test]
fn compare_reports_each_policy() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cmp.csv");
    ok(&[
        "compare",
        "--synthetic",
        "n=300,load=0.9,capacity=1,dist=heavy,shape=1.2,scale=20,alloc=fixed:1",
        "--policies",
        "fifo,srsf,maxmin,themis,afs,pcs:0.1:1:0",
        "--out",
        out.to_str().unwrap(),
    ]);
    let rows = rows(&out);
    assert_eq!(rows.len(), 6);
    let avg = |i: usize| rows[i][1].parse::<f64>().unwrap();
    assert_eq!(&rows[0][0], "fifo");
    assert_eq!(rows[0][6].parse::<f64>().unwrap(), 0.0);
    assert!(avg(1) <= avg(0), "srsf {} vs fifo {}", avg(1), avg(0));
}

#[test]
fn predict_on_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    fs::write(&empty, r#"{"clock": 5, "capacity": 4, "jobs": []}"#).unwrap();
    let e = empty.to_str().unwrap();
    assert_eq!(ok(&["predict", "--snapshot", e, "--job", "size=40,max_gpus=4"]).trim(), "10.000000");

    let queue = dir.path().join("queue.json");
    fs::write(
        &queue,
        r#"{"clock": 2, "capacity": 1, "jobs": [
            {"job_id": "r", "arrival": 0, "size": 5, "max_gpus": 1, "accrued": 2, "allocation": 1},
            {"job_id": "q", "arrival": 1, "size": 4, "max_gpus": 1}]}"#,
    )
    .unwrap();
    let q = queue.to_str().unwrap();
    assert_eq!(ok(&["predict", "--snapshot", q, "--job", "size=6"]).trim(), "13.000000");
    // Under max-min a short job shares with both others from the start.
    let mm = ok(&["predict", "--snapshot", q, "--job", "size=1", "--policy", "maxmin"]);
    assert_eq!(mm.trim(), "3.000000");
}

#[test]
fn search_writes_front_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    ok(&[
        "search",
        "--synthetic",
        WORKLOAD,
        "--objectives",
        "jct:avg,pred_err:avg",
        "--budget",
        "60",
        "--population",
        "10",
        "--out",
        out.to_str().unwrap(),
    ]);
    let front = json(&out.join("front.json"));
    let points = front["points"].as_array().expect("point list");
    assert!(!points.is_empty());
    // The front file feeds straight back into simulate.
    let cfg = format!("{}#0", out.join("front.json").display());
    ok(&["simulate", "--synthetic", WORKLOAD, "--policy", "pcs", "--pcs-config", &cfg]);
}

#[test]
fn experiment_reports() {
    let small = "n=120,load=0.8,capacity=8,alloc=pow2:8";
    let search = ["--budget", "40", "--population", "10"];

    let v: Value = serde_json::from_str(&ok(&[
        &["experiment", "size-error", "--synthetic", small, "--errors", "0,0.2"][..],
        &search[..],
    ]
    .concat()))
    .unwrap();
    let rows = v["report"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["rel_error"], 0.0);
    assert_eq!(rows[0]["fifo_pred_err"], 0.0);

    let v: Value = serde_json::from_str(&ok(&[
        &["experiment", "sensitivity", "--synthetic", small, "--load-a", "0.7", "--load-b", "0.7"][..],
        &search[..],
    ]
    .concat()))
    .unwrap();
    assert_eq!(v["report"]["fraction_within"], 1.0);
    assert!(v["report"]["points"].as_array().unwrap().iter().all(|p| p["distance"] == 0.0));

    let v: Value = serde_json::from_str(&ok(&[
        &["experiment", "heuristics", "--synthetic", small, "--classes", "3"][..],
        &search[..],
    ]
    .concat()))
    .unwrap();
    let r = &v["report"];
    assert_eq!(r["budget"], 40);
    for hv in ["heuristic_hypervolume", "raw_hypervolume"] {
        let hv = r[hv].as_f64().unwrap();
        assert!((0.0..=1.21).contains(&hv), "{hv}");
    }
    assert!(v["metadata"]["config_hash"].is_string());
}

#[test]
fn bad_input_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| pcs(args).status.code();
    assert_eq!(code(&["simulate", "--synthetic", WORKLOAD, "--policy", "lottery"]), Some(1));
    assert_eq!(code(&["experiment", "nope"]), Some(1));
    assert_eq!(code(&["simulate", "--trace", "/nonexistent.csv"]), Some(1));

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "job_id,arrival,size,max_gpus\na,0,-5,1\n").unwrap();
    let out = pcs(&["simulate", "--trace", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    assert_eq!(code(&["--help"]), Some(0));
}
