use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ase(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ase"))
        .args(args)
        .env_remove("ASE_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

const SYNTH: &[&str] = &["--synth", "300:20:3:2.5", "--synth-seed", "3"];

fn with<'a>(base: &[&'a str], extra: &[&'a str]) -> Vec<&'a str> {
    base.iter().chain(extra).copied().collect()
}

#[test]
fn gen_synth_round_trips_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = ase(&[
            "gen-synth",
            "--negatives",
            "1000",
            "--positives",
            "50",
            "--dim",
            "5",
            "--separation",
            "3",
            "--seed",
            "7",
            "--output",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    assert_eq!(String::from_utf8(bytes).unwrap().lines().count(), 1051);

    let summary = json(&ase(&["summarize", "--data", a.to_str().unwrap(), "--format", "json"]));
    assert_eq!(summary["instances"], 1050);
    assert_eq!(summary["positives"], 50);
    assert_eq!(summary["features"], 5);
}

#[test]
fn separation_drives_single_tree_auc() {
    let auc = |sep: &str| {
        let r = json(&ase(&[
            "benchmark",
            "--synth",
            &format!("1000:50:5:{sep}"),
            "--synth-seed",
            "7",
            "--models",
            "base",
            "--repeats",
            "3",
        ]));
        r["means"][0]["metrics"]["auc"].as_f64().unwrap()
    };
    assert!(auc("6") - auc("0") >= 0.3);
}

#[test]
fn benchmark_report_structure() {
    let args = with(&["benchmark"], SYNTH);
    let r = json(&ase(&with(
        &args,
        &["--members", "8", "--repeats", "3", "--output", "-"],
    )));
    assert_eq!(r["command"], "benchmark");
    assert_eq!(r["runs"].as_array().unwrap().len(), 3);
    let names: Vec<&str> = r["means"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["ASE", "DT", "UnderBagging"]);
    for key in ["accuracy", "precision", "recall", "f1", "auc"] {
        assert!(r["means"][0]["metrics"][key].is_number(), "{key}");
    }
    assert_eq!(r["config"]["ase"]["members"], 8);
    assert_eq!(r["runs"][0]["provenance"].as_array().unwrap().len(), 8);
    assert!(r["runs"][0]["timings"]["detector_ms"].is_number());
}

#[test]
fn benchmark_writes_file_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let strip = |p: &Path| {
        let mut v: Value = serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("total_ms");
        for run in v["runs"].as_array_mut().unwrap() {
            run.as_object_mut().unwrap().remove("timings");
        }
        v.to_string()
    };
    let mut reports = Vec::new();
    for name in ["x.json", "y.json"] {
        let p = dir.path().join(name);
        let args = with(&["benchmark"], SYNTH);
        let out = ase(&with(
            &args,
            &["--members", "5", "--seed", "4", "-o", p.to_str().unwrap()],
        ));
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
        reports.push(strip(&p));
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn ablate_variants() {
    let all = json(&ase(&with(&with(&["ablate"], SYNTH), &["--members", "4"])));
    assert_eq!(all["config"]["ase"]["members"], 4);
    assert_eq!(all["means"].as_array().unwrap().len(), 4);
    let one = json(&ase(&with(
        &with(&["ablate"], SYNTH),
        &["--members", "4", "--variant", "full"],
    )));
    assert_eq!(one["means"].as_array().unwrap().len(), 1);
    assert_eq!(one["means"][0]["name"], "full");
}

#[test]
fn curve_csv_and_json() {
    let out = ase(&with(&with(&["curve"], SYNTH), &["--max-members", "6"]));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "members,auc,f1");
    assert_eq!(lines.len(), 7);
    assert!(lines[6].starts_with("6,"));

    let j = json(&ase(&with(
        &with(&["curve"], SYNTH),
        &["--max-members", "1", "--format", "json"],
    )));
    assert_eq!(j["points"].as_array().unwrap().len(), 1);
}

#[test]
fn positive_predicate_on_semicolon_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("w.csv");
    let mut text = String::from("\"a\";\"b\";\"quality\"\n");
    for i in 0..60 {
        text.push_str(&format!(
            "{};{};{}\n",
            i as f64 * 0.5,
            (i % 7) as f64,
            if i % 10 == 0 { 8 } else { 5 }
        ));
    }
    std::fs::write(&p, text).unwrap();
    let s = json(&ase(&[
        "summarize",
        "--data",
        p.to_str().unwrap(),
        "--delimiter",
        ";",
        "--positive-if",
        "quality >= 7",
        "--format",
        "json",
    ]));
    assert_eq!(s["positives"], 6);
    assert_eq!(s["features"], 2);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["benchmark"],
        vec!["benchmark", "--synth", "10:5:2"],
        vec!["benchmark", "--synth", "100:10:2:1", "--bins", "1"],
        vec!["benchmark", "--synth", "100:10:2:1", "--contamination", "0.5:0.2"],
        vec!["benchmark", "--synth", "100:10:2:1", "--members", "0"],
        vec!["benchmark", "--synth", "100:10:2:1", "--repeats", "0"],
        vec!["benchmark", "--synth", "100:10:2:1", "--train-fraction", "1.5"],
        vec!["ablate", "--synth", "100:10:2:1", "--variant", "nope"],
        vec!["frobnicate"],
    ] {
        let out = ase(&args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn data_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x,label\n1.0,0\nabc,1\n").unwrap();
    let out = ase(&["summarize", "--data", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("line 3") && msg.contains('x'), "{msg}");

    let missing = dir.path().join("missing.csv");
    assert_eq!(
        ase(&["summarize", "--data", missing.to_str().unwrap()]).status.code(),
        Some(1)
    );

    let out = ase(&[
        "gen-synth",
        "--output",
        dir.path().join("no/such/dir.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn thread_cap_does_not_change_results() {
    let args = with(&with(&["benchmark"], SYNTH), &["--members", "6", "--models", "ase"]);
    let scores = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_ase"))
            .args(&args)
            .env("ASE_THREADS", threads)
            .output()
            .unwrap();
        json(&out)["runs"][0]["models"][0]["scores"].to_string()
    };
    assert_eq!(scores("1"), scores("0"));
    let bad = Command::new(env!("CARGO_BIN_EXE_ase"))
        .args(&args)
        .env("ASE_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
