use std::process::{Command, Output};

use serde_json::Value;

fn conftc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conftc"))
        .args(args)
        .env_remove("CONFTC_CACHE_DIR")
        .env_remove("CONFTC_MEMORY_BUDGET")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn betti_json() {
    let out = conftc(&["betti", "--n", "4", "--w", "4"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["betti"], serde_json::json!([1, 6, 11, 6]));
    assert_eq!(v["cells"], serde_json::json!([24, 72, 72, 24]));
    assert_eq!(v["euler"], 0);
    assert_eq!(v["cached"], false);
}

#[test]
fn betti_uses_cache() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_str().unwrap();
    let first = conftc(&["--cache-dir", path, "betti", "--n", "5", "--w", "3"]);
    assert!(first.status.success());
    assert_eq!(json(&first)["cached"], false);
    assert!(dir.path().join("betti-n5-w3-riffle-f2-v1.json").exists());

    let second = conftc(&["--cache-dir", path, "betti", "--n", "5", "--w", "3"]);
    let v = json(&second);
    assert_eq!(v["cached"], true);
    assert_eq!(v["betti"], json(&first)["betti"]);
}

#[test]
fn corrupt_cache_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("betti-n3-w2-riffle-f2-v1.json"), "not json").unwrap();
    let out = conftc(&["--cache-dir", dir.path().to_str().unwrap(), "betti", "--n", "3", "--w", "2"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["cached"], false);
    assert_eq!(v["betti"], serde_json::json!([1, 7]));
}

#[test]
fn cells_reports_top_dimension() {
    let v = json(&conftc(&["cells", "--n", "7", "--w", "3"]));
    assert_eq!(v["top_dimension"], 4);
    assert_eq!(v["formula_holds"], true);
}

#[test]
fn certify_narrow_strip() {
    let out = conftc(&["certify", "--n", "6", "--w", "2", "--verify", "both"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["disjoint_symbolic"], true);
    assert_eq!(v["disjoint_chain"], true);
    assert_eq!(v["lower_bound"], 6);
}

#[test]
fn certify_symbolic_skips_chain() {
    let v = json(&conftc(&["certify", "--n", "9", "--w", "4", "--verify", "symbolic"]));
    assert_eq!(v["disjoint_symbolic"], true);
    assert!(v["disjoint_chain"].is_object());
}

#[test]
fn certify_one_disk_is_not_applicable() {
    let out = conftc(&["certify", "--n", "1", "--w", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn tc_values() {
    let v = json(&conftc(&["tc", "--n", "7", "--w", "3", "--r", "3"]));
    assert_eq!(v["tc"], 12);
    assert_eq!(v["dtc"], 12);
    assert_eq!(v["case"], "n>w");

    let v = json(&conftc(&["tc", "--n", "3", "--w", "5", "--r", "2"]));
    assert_eq!(v["tc"], 3);
    assert_eq!(v["upper_bgrt"], 4);

    let v = json(&conftc(&["tc", "--n", "1", "--w", "3", "--r", "4"]));
    assert_eq!(v["tc"], 0);
    assert_eq!(conftc(&["tc", "--n", "4", "--w", "1"]).status.code(), Some(1));
}

#[test]
fn witness_value() {
    let out = conftc(&["witness", "--m", "3", "--l", "2", "--r", "2"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["factors"], 5);
    assert_eq!(v["value"].as_i64().unwrap().abs(), 1);
}

#[test]
fn witness_rejects_l_above_m() {
    assert_eq!(conftc(&["witness", "--m", "1", "--l", "2", "--r", "2"]).status.code(), Some(1));
}

#[test]
fn reference_spaces() {
    let v = json(&conftc(&["reference", "--space", "F(4,3)", "--r", "2"]));
    assert_eq!(v[0]["value"], 6);
    let out = conftc(&["reference", "--space", "nowhere"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn memory_budget_exit_code() {
    let out = conftc(&["--memory-budget", "1K", "betti", "--n", "6", "--w", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_conftc"))
        .args(["betti", "--n", "6", "--w", "3"])
        .env("CONFTC_MEMORY_BUDGET", "2K")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors() {
    assert_eq!(conftc(&["betti", "--n", "0", "--w", "2"]).status.code(), Some(1));
    assert_eq!(conftc(&["betti", "--n", "13", "--w", "2"]).status.code(), Some(1));
    assert_eq!(conftc(&["betti", "--n", "x", "--w", "2"]).status.code(), Some(1));
    assert_eq!(conftc(&["nonsense"]).status.code(), Some(1));
    assert_eq!(conftc(&["--help"]).status.code(), Some(0));
    assert_eq!(conftc(&["--version"]).status.code(), Some(0));
}

#[test]
fn table_format() {
    let out = conftc(&["--format", "table", "tc", "--n", "5", "--w", "2", "--r", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("TC_r        4"));
}

#[test]
fn spec_style_examples() {
    let v = json(&conftc(&["betti", "--n", "1", "--w", "1"]));
    assert_eq!(v["betti"], serde_json::json!([1]));
    let v = json(&conftc(&["betti", "--n", "3", "--w", "3"]));
    assert_eq!(v["betti"], serde_json::json!([1, 3, 2]));

    let out = conftc(&["certify", "--n", "7", "--w", "3", "--r", "2", "--verify", "both"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["pair"]["a"], "W(7,4,3)W(6,2,1)W(5)");
    assert_eq!(v["pair"]["b"], "W(6,4,3)W(5,2,1)W(7)");
    assert_eq!(v["lower_bound"], 8);

    assert_eq!(json(&conftc(&["certify", "--n", "3", "--w", "2", "--r", "4"]))["lower_bound"], 4);

    let v = json(&conftc(&["witness", "--m", "2", "--l", "2", "--r", "3"]));
    assert_eq!(v["factors"], 6);

    let v = json(&conftc(&["cells", "--n", "5", "--w", "2"]));
    assert_eq!(v["top_dimension"], 2);
}
