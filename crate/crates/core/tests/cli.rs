use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cubic-thue"));
    c.env_remove("CUBIC_THUE_PRECISION");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_lines(o: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&o.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("every line is JSON"))
        .collect()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cubic-thue-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn family_range() {
    let o = run(&["family", "--D", "1", "--n", "-2..2"]);
    assert!(o.status.success());
    let v = json_lines(&o);
    assert_eq!(v[0], serde_json::json!({"schema": 1}));
    assert_eq!(v.len(), 6);
    assert_eq!(v[2]["n"], -1);
    assert_eq!(v[2]["form"], serde_json::json!(["1", "-3", "3", "-1"]));
    assert_eq!(v[2]["degenerate"], true);
}

#[test]
fn family_table_and_bad_parameter() {
    let o = run(&["family", "--D", "2", "--n", "1", "--output", "table"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("1 -156 12 -1"));
    assert_eq!(run(&["family", "--D", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["family", "--D", "0"]).status.code(), Some(2));
    assert_eq!(run(&["family", "--D", "1", "--n", "3..1"]).status.code(), Some(2));
    assert_eq!(run(&["family"]).status.code(), Some(2));
}

#[test]
fn solve_small_box() {
    let o = run(&["solve", "--D", "1", "--k", "2", "--n", "-5..5", "--y-max", "50"]);
    assert!(o.status.success());
    let v = json_lines(&o);
    assert!(v.iter().any(|r| r["n"] == 0 && r["x"] == "1" && r["y"] == "-1" && r["value"] == "2"));
    assert!(v.iter().skip(1).all(|r| r["n"] != -1));
}

#[test]
fn solve_zero_k_is_empty() {
    let o = run(&["solve", "--D", "1", "--k", "0"]);
    assert!(o.status.success());
    assert_eq!(json_lines(&o).len(), 1);
}

#[test]
fn oracle_flag_matches_pruned() {
    let args = ["solve", "--D", "1", "--k", "10", "--y-max", "300"];
    let a = run(&args);
    let mut with_oracle = args.to_vec();
    with_oracle.push("--oracle");
    let b = run(&with_oracle);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(json_lines(&a).len() > 1);
}

#[test]
fn solve_with_decompositions() {
    let o = run(&["solve", "--D", "2", "--k", "10", "--y-max", "100", "--decompose"]);
    let v = json_lines(&o);
    assert!(v.len() > 1);
    assert!(v.iter().skip(1).all(|r| r["ell"].is_i64() && r["xi1"].is_array()));
}

#[test]
fn trace_certificate() {
    let o = run(&["trace", "--D", "1", "--n", "0", "--x", "1", "--y", "-1", "--k", "2"]);
    assert!(o.status.success());
    let v = json_lines(&o);
    let c = &v[1];
    assert!(c["case"].as_str().unwrap().ends_with("_dominant"));
    assert_eq!(c["sum_contains_zero"], true);
    assert!(c["ledger"].as_array().unwrap().iter().any(|r| r["id"] == "8"));
    // Non-integers are decimal strings with a radius.
    assert!(c["terms"][0]["im"]["mid"].is_string());
    assert!(c["terms"][0]["im"]["rad"].is_string());
}

#[test]
fn trace_rejects_non_solutions() {
    let o = run(&["trace", "--D", "1", "--n", "-1", "--x", "1", "--y", "1"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("rational"));
    assert_eq!(run(&["trace", "--D", "1", "--n", "0", "--x", "0", "--y", "1"]).status.code(), Some(4));
    assert_eq!(
        run(&["trace", "--D", "1", "--n", "0", "--x", "7", "--y", "1", "--k", "2"]).status.code(),
        Some(4)
    );
}

#[test]
fn trace_precision_cap() {
    let cfg = temp_file("tight.toml", "precision = 1e-30\nmax_precision_bits = 132\n");
    let o = bin()
        .args(["trace", "--D", "2", "--n", "8", "--x", "1", "--y", "-1", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn config_and_environment() {
    let bad = temp_file("bad.toml", "precision = -1.0\n");
    let o = bin().args(["family", "--D", "1", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let table = temp_file("table.toml", "output = \"table\"\n");
    let o = bin().args(["family", "--D", "1", "--config"]).arg(&table).output().unwrap();
    assert!(!String::from_utf8_lossy(&o.stdout).contains("schema"));

    let trace = ["trace", "--D", "1", "--n", "0", "--x", "1", "--y", "-1"];
    let fine = json_lines(&bin().args(trace).output().unwrap())[1]["precision_bits"].as_u64().unwrap();
    let o = bin().args(trace).env("CUBIC_THUE_PRECISION", "1e-10").output().unwrap();
    let coarse = json_lines(&o)[1]["precision_bits"].as_u64().unwrap();
    assert!(coarse < fine);
    let o = bin().args(trace).env("CUBIC_THUE_PRECISION", "abc").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_suite() {
    let o = run(&["verify", "--D", "1,2,3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json_lines(&o);
    assert!(v.iter().skip(1).all(|c| c["pass"] == true));
    assert!(v.iter().any(|c| c["check"] == "oracle_equivalence"));
}

#[test]
fn verify_detects_corrupted_family() {
    let good = r#"{"min_poly":["1","3","3","-1"],"alpha_coords":["3","3","1"],"epsilon_coords":["3","3","1"],"D":1}"#;
    let p = temp_file("good.json", good);
    let o = bin().args(["verify", "--family-file"]).arg(&p).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    // ε replaced by ε²: still a unit, no longer the D = 1 example.
    let bad = r#"{"min_poly":["1","3","3","-1"],"alpha_coords":["3","3","1"],"epsilon_coords":["12","10","3"],"D":1}"#;
    let p = temp_file("bad.json", bad);
    let o = bin().args(["verify", "--family-file"]).arg(&p).output().unwrap();
    assert_eq!(o.status.code(), Some(5));
    let v = json_lines(&o);
    assert_eq!(v.last().unwrap()["pass"], false);

    let p = temp_file("garbage.json", "{ not json");
    let o = bin().args(["verify", "--family-file"]).arg(&p).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_rows() {
    let o = run(&["sweep", "--D", "1", "--k", "2,10", "--n", "-4..4", "--y-max", "200"]);
    assert!(o.status.success());
    let v = json_lines(&o);
    assert_eq!(v.len(), 3);
    assert_eq!(v[1]["k"], "2");
    assert_eq!(v[2]["box_stable"], true);
}
