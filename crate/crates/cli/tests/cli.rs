use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../scenarios/{name}.json"))
}

fn finclear(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finclear"))
        .args(args)
        .env_remove("FINCLEAR_TOLERANCE")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let o = finclear(&all);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn write_temp(name: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("finclear-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn solve_triangle() {
    let o = finclear(&["solve", scenario("triangle").to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("r=(0.5, 1, 1)"), "{text}");
    assert!(text.contains("payoffs=(0, 3, 0)"), "{text}");

    let report = json(&["solve", scenario("triangle").to_str().unwrap()]);
    assert_eq!(report["multiplicity"], "unique");
    assert_eq!(report["solutions"][0]["recovery"]["u"], 0.5);
    assert_eq!(report["system"]["banks"].as_array().unwrap().len(), 3);
}

#[test]
fn solve_all_lists_both_injection_solutions() {
    let path = scenario("inject");
    let report = json(&["solve", "--all", path.to_str().unwrap()]);
    let v: Vec<f64> = report["solutions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["payoffs"]["v"].as_f64().unwrap())
        .collect();
    assert_eq!(v, vec![0.0, 99.0]);

    let first = json(&["solve", path.to_str().unwrap()]);
    assert_eq!(first["found"], 2);
    assert_eq!(first["solutions"].as_array().unwrap().len(), 1);
    assert_eq!(first["solutions"][0], report["solutions"][0]);
}

#[test]
fn game_prints_equilibrium() {
    let o = finclear(&["game", "prisoners", "--nash"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("\"defect/defect\" (2.667, 2.667)"), "{}", stdout(&o));

    let report = json(&["game", "stag_hunt"]);
    assert_eq!(report["nash"].as_array().unwrap().len(), 2);
}

#[test]
fn assess_and_scan() {
    let path = scenario("inject");
    let r = json(&["assess", path.to_str().unwrap(), "--inject", "1", "--bank", "v"]);
    assert_eq!(r["payoffs_before"], serde_json::json!([0.0, 99.0]));
    assert_eq!(r["payoffs_after"], serde_json::json!([100.0]));

    let path = scenario("remove_debt");
    let r = json(&["assess", path.to_str().unwrap(), "--remove", "debt_u_v"]);
    assert_eq!(r["acting"], "v");
    assert_eq!(r["payoffs_after"], serde_json::json!([2.0]));

    let path = scenario("partial_removal");
    let scan = json(&["scan-gamma", path.to_str().unwrap(), "--contract", "debt_u_v", "--steps", "4"]);
    assert_eq!(scan["best_fraction"], 0.5);
    assert_eq!(scan["curve"].as_array().unwrap().len(), 5);
}

#[test]
fn auction_trace() {
    let state = json(&["auction", "--epsilon", "0.01", "--rounds", "4"]);
    assert_eq!(state["history"].as_array().unwrap().len(), 4);
    assert_eq!(state["spent_u_prime"], 3);
    assert_eq!(state["spent_v_prime"], 4);
}

#[test]
fn scenario_documents_match_bundled_files() {
    for name in ["triangle", "inject", "prisoners"] {
        let o = finclear(&["scenario", name]);
        let printed: Value = serde_json::from_slice(&o.stdout).unwrap();
        let file: Value = serde_json::from_str(&std::fs::read_to_string(scenario(name)).unwrap()).unwrap();
        assert_eq!(printed, file, "{name}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(finclear(&["validate", scenario("triangle").to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(finclear(&["solve", "--bogus"]).status.code(), Some(1));
    assert_eq!(finclear(&["game", "volunteer", "--k", "1"]).status.code(), Some(1));

    let unknown = write_temp(
        "unknown.json",
        r#"{"banks": [{"id": "a", "external_assets": 1}],
            "contracts": [{"debtor": "a", "creditor": "b", "notional": 1, "kind": "debt"}]}"#,
    );
    let o = finclear(&["validate", unknown.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown bank `b`"));

    let garbled = write_temp("garbled.json", r#"{"banks": [{"id": "a", "external_assets": "x"}]}"#);
    let o = finclear(&["solve", garbled.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("banks[0].external_assets"));

    // A ring of 30 banks that could each default is beyond enumeration.
    let banks: Vec<String> = (0..30).map(|i| format!(r#"{{"id": "b{i}", "external_assets": 0.5}}"#)).collect();
    let debts: Vec<String> = (0..30)
        .map(|i| format!(r#"{{"debtor": "b{i}", "creditor": "b{}", "notional": 1, "kind": "debt"}}"#, (i + 1) % 30))
        .collect();
    let ring = write_temp(
        "ring.json",
        &format!(r#"{{"banks": [{}], "contracts": [{}]}}"#, banks.join(","), debts.join(",")),
    );
    assert_eq!(finclear(&["solve", ring.to_str().unwrap()]).status.code(), Some(3));
    let o = finclear(&["solve", "--multistart-only", ring.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn tolerance_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_finclear"))
        .args(["solve", scenario("triangle").to_str().unwrap()])
        .env("FINCLEAR_TOLERANCE", "-1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tolerance"));
}
