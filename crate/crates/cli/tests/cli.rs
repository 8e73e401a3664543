use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("noisyqma-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_noisyqma")).args(args).output().expect("binary runs")
}

fn json_without_metadata(path: &Path) -> Value {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("metadata");
    v
}

#[test]
fn missing_graph_exits_with_two() {
    let cfg = fixtures().join("missing_graph.toml");
    let out = run(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid configuration"));
}

#[test]
fn invalid_params_exit_with_two() {
    let out = run(&["gap", "--workers", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let cfg = scratch("bad_r.toml");
    std::fs::write(&cfg, "[params]\nr = 4\n").unwrap();
    let out = run(&["gap", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn analytic_domain_error_exits_with_one() {
    let cfg = scratch("domain.toml");
    std::fs::write(&cfg, "[params]\nepsilon = 0.5\ns = 1\nt = 2\n").unwrap();
    let out = run(&["gap", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn same_seed_gives_identical_json_across_worker_counts() {
    let cfg = fixtures().join("honest.toml");
    let cfg = cfg.to_str().unwrap();
    let (a, b) = (scratch("sim_a.json"), scratch("sim_b.json"));
    for (path, workers) in [(&a, "1"), (&b, "4")] {
        let out = run(&["simulate", "--config", cfg, "--seed", "7", "--shots", "1500", "--workers", workers, "--out", path.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (va, vb) = (json_without_metadata(&a), json_without_metadata(&b));
    assert_eq!(va, vb);
    assert_eq!(va["schema"], 1);
    assert_eq!(va["seed"], 7);
    let text = |p: &Path| {
        let s = std::fs::read_to_string(p).unwrap();
        s[..s.find("\"metadata\"").unwrap()].to_string()
    };
    assert_eq!(text(&a), text(&b));
}

#[test]
fn different_seeds_differ() {
    let cfg = fixtures().join("honest.toml");
    let cfg = cfg.to_str().unwrap();
    let (a, b) = (scratch("seed_a.json"), scratch("seed_b.json"));
    run(&["simulate", "--config", cfg, "--seed", "1", "--shots", "800", "--out", a.to_str().unwrap()]);
    run(&["simulate", "--config", cfg, "--seed", "2", "--shots", "800", "--out", b.to_str().unwrap()]);
    assert_ne!(json_without_metadata(&a)["result"], json_without_metadata(&b)["result"]);
}

#[test]
fn oracle_check_passes_and_fault_injection_fails() {
    let ok = run(&["oracle-check", "--shots", "10"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));
    let bad = run(&["oracle-check", "--inject-fault"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("tableau-vs-dense"));
}

#[test]
fn oracle_check_rejects_graphs_above_the_dense_cap() {
    let graph = scratch("big.graph");
    let mut text = String::from("16 15\n");
    for i in 0..16 {
        text.push_str(&format!("{i} {} 1\n", if i % 2 == 0 { "b" } else { "w" }));
    }
    for i in 0..15 {
        text.push_str(&format!("{i} {}\n", i + 1));
    }
    std::fs::write(&graph, text).unwrap();
    let cfg = scratch("big.toml");
    std::fs::write(&cfg, format!("graph = {:?}\n", graph.to_str().unwrap())).unwrap();
    let out = run(&["oracle-check", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gap_sweep_writes_csv() {
    let csv = scratch("sweep.csv");
    let out = run(&["gap", "--sweep", "--out", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("epsilon,q_star,delta3_at_q_star"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 16);
    assert!(rows.iter().all(|r| r.len() == 3 && r[1] > 0.0 && r[1] < 1.0));
}

#[test]
fn gap_table_reports_the_bound() {
    let out = run(&["gap"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success());
    assert!(stdout.contains("0.003028101 (holds)"), "{stdout}");
}

#[test]
fn strict_preset_passes_half_the_time() {
    let cfg = fixtures().join("strict_deviated.toml");
    let path = scratch("strict.json");
    let out = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v = json_without_metadata(&path);
    let p = v["result"]["acceptance"]["p_acc"]["mean"].as_f64().unwrap();
    assert!((0.47..=0.53).contains(&p), "{p}");
}

#[test]
fn theorem1_and_amplify_run() {
    let t = fixtures().join("theorem1.toml");
    let out = run(&["theorem1", "--config", t.to_str().unwrap(), "--shots", "500"]);
    assert!(out.status.success());
    let a = fixtures().join("amplify_shared.toml");
    let path = scratch("amp.json");
    let out = run(&["amplify", "--config", a.to_str().unwrap(), "--shots", "200", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_without_metadata(&path);
    assert_eq!(v["result"]["report"]["runs"], 15);
}
