//! Deterministic JSON run reports.
//!
//! A report carries the subcommand name, the SHA-256 of every input file,
//! the working order, named boolean verdicts in a fixed order, the
//! machine-readable details of the first failure, and the command's payload.
//! Wall time stays out of the JSON on purpose — it goes to stderr — so that
//! identical inputs always produce byte-identical reports.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

/// One named pass/fail entry.
#[derive(Serialize)]
pub struct Verdict {
    pub check: String,
    pub pass: bool,
}

/// The report emitted on stdout by every subcommand.
#[derive(Serialize)]
pub struct RunReport {
    pub command: String,
    /// Role -> SHA-256 of the raw input bytes.
    pub inputs: BTreeMap<String, String>,
    pub order: u32,
    pub ok: bool,
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<Value>,
}

impl RunReport {
    /// An empty passing report for `command` at `order`.
    pub fn new(command: &str, order: u32) -> Self {
        RunReport {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            order,
            ok: true,
            verdicts: Vec::new(),
            failure: None,
            output: None,
        }
    }

    /// Records the hash of an input file under its role name.
    pub fn record_input(&mut self, role: &str, bytes: &[u8]) {
        self.inputs.insert(role.to_string(), sha256_hex(bytes));
    }

    /// Appends a verdict; any failing verdict makes the whole report fail.
    pub fn verdict(&mut self, check: &str, pass: bool) {
        self.verdicts.push(Verdict {
            check: check.to_string(),
            pass,
        });
        self.ok &= pass;
    }

    /// Appends a failing verdict and keeps the first failure's details.
    pub fn fail(&mut self, check: &str, details: Value) {
        self.verdict(check, false);
        self.failure.get_or_insert(details);
    }

    /// The canonical byte rendering: pretty JSON plus a trailing newline.
    pub fn to_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("reports contain only serializable data");
        text.push('\n');
        text
    }

    /// One-line human summary for stderr.
    pub fn summary(&self) -> String {
        let failed: Vec<&str> = self
            .verdicts
            .iter()
            .filter(|v| !v.pass)
            .map(|v| v.check.as_str())
            .collect();
        if self.ok {
            format!(
                "{}: ok ({} check{})",
                self.command,
                self.verdicts.len(),
                if self.verdicts.len() == 1 { "" } else { "s" }
            )
        } else {
            format!("{}: FAILED [{}]", self.command, failed.join(", "))
        }
    }
}

/// Lowercase hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hashing_matches_the_reference_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn any_failing_verdict_fails_the_report() {
        let mut report = RunReport::new("demo", 6);
        report.verdict("first", true);
        assert!(report.ok);
        report.fail("second", serde_json::json!({"why": "because"}));
        report.verdict("third", true);
        assert!(!report.ok);
        assert_eq!(report.failure, Some(serde_json::json!({"why": "because"})));
        assert!(report.summary().contains("second"));
    }

    #[test]
    fn rendering_is_stable() {
        let mut report = RunReport::new("demo", 6);
        report.record_input("model", b"xyz");
        assert_eq!(report.to_json(), report.to_json());
        assert!(report.to_json().ends_with('\n'));
    }
}
