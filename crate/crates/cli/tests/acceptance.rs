//! Acceptance gate: one test per battery criterion, each run end-to-end
//! through the binary. Every test prints a single pass/fail line.

use std::path::PathBuf;
use std::process::Command;

fn run_criterion(n: u8) -> bool {
    let config = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/battery.json");
    let out = Command::new(env!("CARGO_BIN_EXE_crmw"))
        .arg("battery")
        .arg("--config")
        .arg(&config)
        .args(["--criteria", &n.to_string(), "--json"])
        .env("CRMW_THREADS", "2")
        .output()
        .expect("binary runs");
    let report: serde_json::Value = match serde_json::from_slice(&out.stdout) {
        Ok(v) => v,
        Err(e) => panic!(
            "stdout is not a JSON report ({e}); stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        ),
    };
    let name = format!("criterion-{n:02}");
    let verdict = report["verdicts"]
        .as_array()
        .expect("verdict list")
        .iter()
        .find(|v| v["check"] == name.as_str())
        .unwrap_or_else(|| panic!("missing verdict {name}"))["pass"]
        .as_bool()
        .expect("boolean verdict");
    let label = report["output"]["criteria"][0]["label"]
        .as_str()
        .unwrap_or("")
        .to_string();
    let expected_code = if verdict { 0 } else { 1 };
    let code_ok = out.status.code() == Some(expected_code);
    let pass = verdict && code_ok;
    println!(
        "criterion {n:02} ({label}): {}",
        if pass { "pass" } else { "fail" }
    );
    if !pass {
        println!("failure details: {}", report["failure"]);
    }
    pass
}

#[test]
fn criterion_01_construction_routes_agree() {
    assert!(run_criterion(1));
}

#[test]
fn criterion_02_rank_condition_holds_and_breaks() {
    assert!(run_criterion(2));
}

#[test]
fn criterion_03_geometric_series_pinned() {
    assert!(run_criterion(3));
}

#[test]
fn criterion_04_realization_low_order_terms() {
    assert!(run_criterion(4));
}

#[test]
fn criterion_05_symbol_round_trip() {
    assert!(run_criterion(5));
}

#[test]
fn criterion_06_realizability_split() {
    assert!(run_criterion(6));
}

#[test]
fn criterion_07_tangency_of_symmetry_fields() {
    assert!(run_criterion(7));
}

#[test]
fn criterion_08_heisenberg_closure() {
    assert!(run_criterion(8));
}

#[test]
fn criterion_09_pivot_normal_form() {
    assert!(run_criterion(9));
}

#[test]
fn criterion_10_equivalence_witness() {
    assert!(run_criterion(10));
}

#[test]
fn criterion_11_perturbation_invariance() {
    assert!(run_criterion(11));
}

#[test]
fn criterion_12_group_action_preservation() {
    assert!(run_criterion(12));
}
