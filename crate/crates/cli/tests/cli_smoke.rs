//! End-to-end CLI checks: exit codes, report determinism, and the error
//! surfaces for malformed input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_str()
        .expect("fixture path is UTF-8")
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crmw"))
        .args(args)
        .env("CRMW_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not a JSON report ({e}); stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn stderr_text(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).to_string()
}

/// Scratch directory removed on drop.
struct TempDir(PathBuf);

impl TempDir {
    fn new(tag: &str) -> Self {
        let path = std::env::temp_dir().join(format!("crmw-{tag}-{}", std::process::id()));
        fs::create_dir_all(&path).expect("create scratch dir");
        TempDir(path)
    }

    fn path(&self) -> &Path {
        &self.0
    }

    fn file(&self, name: &str) -> String {
        self.0.join(name).to_str().expect("UTF-8 path").to_string()
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

#[test]
fn build_emits_a_passing_report() {
    let out = run(&["build", "--model", &fixture("m1.model.json")]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["command"], "build");
    assert_eq!(report["ok"], true);
    assert_eq!(report["order"], 6);
    assert_eq!(report["output"]["s"], 1);
    assert_eq!(report["output"]["r"], 1);
    assert!(stderr_text(&out).contains("build: ok"));
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = ["build", "--model", &fixture("wide.model.json"), "--json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(a.stderr.is_empty(), "--json must silence the summary");
}

#[test]
fn thread_count_does_not_change_the_report() {
    let args = [
        "battery",
        "--config",
        &fixture("battery.json"),
        "--criteria",
        "3",
        "--json",
    ];
    let single = Command::new(env!("CARGO_BIN_EXE_crmw"))
        .args(args)
        .env("CRMW_THREADS", "1")
        .output()
        .expect("binary runs");
    let many = Command::new(env!("CARGO_BIN_EXE_crmw"))
        .args(args)
        .env("CRMW_THREADS", "4")
        .output()
        .expect("binary runs");
    assert_eq!(single.status.code(), Some(0));
    assert_eq!(single.stdout, many.stdout);
}

#[test]
fn out_flag_duplicates_stdout() {
    let tmp = TempDir::new("out");
    let report_path = tmp.file("report.json");
    let out = run(&[
        "build",
        "--model",
        &fixture("m1.model.json"),
        "--out",
        &report_path,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let written = fs::read(&report_path).expect("report written");
    assert_eq!(written, out.stdout);
}

#[test]
fn rank_failure_exits_one_with_the_monomial() {
    let out = run(&["verify-rank", "--eq", &fixture("broken.eq.json")]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    assert_eq!(report["ok"], false);
    let monomial = report["failure"]["monomial"].as_str().expect("named monomial");
    assert!(!monomial.is_empty());
    assert!(stderr_text(&out).contains("rank_condition"));
}

#[test]
fn verify_rank_accepts_seed_data_too() {
    let out = run(&["verify-rank", "--model", &fixture("wide.model.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["output"]["ok"], true);
}

#[test]
fn verify_rank_needs_exactly_one_source() {
    let out = run(&["verify-rank"]);
    assert_eq!(out.status.code(), Some(2));
    let both = run(&[
        "verify-rank",
        "--eq",
        &fixture("broken.eq.json"),
        "--model",
        &fixture("wide.model.json"),
    ]);
    assert_eq!(both.status.code(), Some(2));
}

#[test]
fn malformed_json_is_an_input_error_with_position() {
    let tmp = TempDir::new("malformed");
    let path = tmp.file("bad.json");
    fs::write(&path, "{ this is not json").unwrap();
    let out = run(&["build", "--model", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(stderr_text(&out).contains("line"), "error names the position");
}

#[test]
fn schema_violations_name_the_field() {
    let tmp = TempDir::new("schema");
    let path = tmp.file("short.json");
    fs::write(&path, "{\"s\": 1}\n").unwrap();
    let out = run(&["build", "--model", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_text(&out).contains("missing field"));
}

#[test]
fn unknown_flags_are_usage_errors() {
    let out = run(&["build", "--model", &fixture("m1.model.json"), "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn symbol_reports_constancy_failure() {
    let out = run(&["symbol", "--model", &fixture("foc_false.model.json")]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    let verdicts = report["verdicts"].as_array().unwrap();
    let lookup = |name: &str| {
        verdicts
            .iter()
            .find(|v| v["check"] == name)
            .unwrap_or_else(|| panic!("missing verdict {name}"))["pass"]
            .as_bool()
            .unwrap()
    };
    assert!(lookup("two_nondegenerate"));
    assert!(!lookup("constant_to_first_order"));
    assert!(report["output"]["modified"].is_null());
}

#[test]
fn symbol_of_a_constant_family_includes_the_modified_data() {
    let out = run(&["symbol", "--model", &fixture("wide.model.json")]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert!(report["output"]["modified"].is_object());
}

#[test]
fn realizable_splits_the_frames() {
    let yes = run(&["realizable", "--symbol", &fixture("diag.sym.json")]);
    assert_eq!(yes.status.code(), Some(0));
    assert_eq!(stdout_json(&yes)["output"]["realizable"], true);

    let no = run(&["realizable", "--symbol", &fixture("offdiag.sym.json")]);
    assert_eq!(no.status.code(), Some(1));
    let report = stdout_json(&no);
    assert_eq!(report["output"]["realizable"], false);
    assert_eq!(report["failure"]["condition"], 1);
}

#[test]
fn realize_round_trips_a_symbol() {
    let out = run(&["realize", "--symbol", &fixture("s1.sym.json"), "--order", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["output"]["model"]["s"], 1);
    assert_eq!(report["output"]["roundtrip"]["ok"], true);
}

#[test]
fn realize_refuses_a_non_realizable_symbol() {
    let out = run(&["realize", "--symbol", &fixture("offdiag.sym.json")]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    assert_eq!(report["ok"], false);
    assert!(report["output"].is_null(), "no model for a refused symbol");
}

#[test]
fn symmetries_verifies_the_wide_model() {
    let out = run(&["symmetries", "--model", &fixture("wide.model.json")]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["output"]["span_dimension"], 5);
    assert_eq!(report["output"]["expected_span"], 5);
}

#[test]
fn normalize_reduces_a_built_equation() {
    let tmp = TempDir::new("normalize");
    let report_path = tmp.file("report.json");
    let build = run(&[
        "build",
        "--model",
        &fixture("wide.model.json"),
        "--out",
        &report_path,
        "--json",
    ]);
    assert_eq!(build.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(&report_path).unwrap()).unwrap();
    let eq_path = tmp.file("eq.json");
    fs::write(&eq_path, serde_json::to_string_pretty(&report["output"]).unwrap()).unwrap();

    let out = run(&["normalize", "--eq", &eq_path]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["ok"], true);
    assert!(report["output"]["reduced"].is_object());
    assert_eq!(report["output"]["pivot"]["positions"][0][0], 1);
}

#[test]
fn equiv_splits_good_and_bad_witnesses() {
    let good = run(&[
        "equiv",
        "--model",
        &fixture("m1.model.json"),
        "--model",
        &fixture("m2.model.json"),
        "--witness",
        &fixture("good.witness.json"),
    ]);
    assert_eq!(good.status.code(), Some(0));
    assert_eq!(stdout_json(&good)["output"]["ok"], true);

    let bad = run(&[
        "equiv",
        "--model",
        &fixture("m1.model.json"),
        "--model",
        &fixture("m2.model.json"),
        "--witness",
        &fixture("bad.witness.json"),
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let report = stdout_json(&bad);
    assert_eq!(report["ok"], false);
    assert!(report["failure"]["QuadraticPart"].is_object());
}

#[test]
fn equiv_requires_two_models() {
    let out = run(&[
        "equiv",
        "--model",
        &fixture("m1.model.json"),
        "--witness",
        &fixture("good.witness.json"),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn battery_runs_a_selected_criterion() {
    let out = run(&[
        "battery",
        "--config",
        &fixture("battery.json"),
        "--criteria",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["verdicts"][0]["check"], "criterion-03");
    assert_eq!(report["verdicts"][0]["pass"], true);
    assert!(report["inputs"]["lightcone.model.json"].is_string());
}

#[test]
fn battery_empty_config_warns_and_passes() {
    let out = run(&["battery", "--config", &fixture("battery_empty.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["ok"], true);
    assert!(stderr_text(&out).contains("warning"));
}

#[test]
fn battery_missing_fixture_is_an_input_error() {
    let out = run(&["battery", "--config", &fixture("battery_missing.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_text(&out).contains("criterion-03"));
}

#[test]
fn battery_corrupted_fixture_fails_by_name() {
    let tmp = TempDir::new("corrupt");
    fs::write(
        tmp.path().join("config.json"),
        "{\"fixtures\": \".\", \"criteria\": [3]}\n",
    )
    .unwrap();
    fs::copy(
        fixture("m2.model.json"),
        tmp.path().join("lightcone.model.json"),
    )
    .unwrap();
    let out = run(&["battery", "--config", &tmp.file("config.json")]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    assert_eq!(report["ok"], false);
    assert!(
        report["failure"].to_string().contains("lightcone.model.json"),
        "failure names the fixture"
    );
}

#[test]
fn battery_rejects_unknown_criteria() {
    let out = run(&[
        "battery",
        "--config",
        &fixture("battery.json"),
        "--criteria",
        "13",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_text(&out).contains("unknown criterion"));
}
