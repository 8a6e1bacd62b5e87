//! Machine-readable run reports.
//!
//! Reports are deterministic for identical inputs: check order is the
//! registry order, rationals are serialized as exact `p/q` strings by the
//! core types, and wall-clock timings are kept out of the serialized form
//! entirely (they are printed separately), so two identical invocations
//! produce byte-identical JSON.

use std::collections::BTreeMap;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CheckRecord {
    pub name: String,
    pub description: String,
    pub passed: bool,
    pub details: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub params: BTreeMap<String, String>,
    pub inputs_digest: String,
    pub checks: Vec<CheckRecord>,
    pub verdict: String,
    /// Wall-clock per check, milliseconds. Segregated from the stable part
    /// of the report: never serialized, rendered only in the text form.
    #[serde(skip)]
    pub timings_ms: Vec<(String, u128)>,
}

impl RunReport {
    pub fn new(subcommand: &str, params: BTreeMap<String, String>, digest: String) -> Self {
        RunReport {
            tool: "chowcheck".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            params,
            inputs_digest: digest,
            checks: Vec::new(),
            verdict: "pass".to_string(),
            timings_ms: Vec::new(),
        }
    }

    pub fn push(&mut self, record: CheckRecord, elapsed_ms: u128) {
        if !record.passed {
            self.verdict = "fail".to_string();
        }
        self.timings_ms.push((record.name.clone(), elapsed_ms));
        self.checks.push(record);
    }

    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    /// Round-trip parser for the machine-readable form.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("parsing run report")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{} {} — {}\ninputs digest: {}\n",
            self.tool, self.version, self.subcommand, self.inputs_digest
        ));
        for (key, value) in &self.params {
            out.push_str(&format!("  {key} = {value}\n"));
        }
        let timing: BTreeMap<&str, u128> = self
            .timings_ms
            .iter()
            .map(|(n, ms)| (n.as_str(), *ms))
            .collect();
        for check in &self.checks {
            let status = if check.passed { "PASS" } else { "FAIL" };
            let ms = timing.get(check.name.as_str()).copied().unwrap_or(0);
            out.push_str(&format!("[{status}] {} ({ms} ms)\n", check.name));
            for line in &check.details {
                out.push_str(&format!("    {line}\n"));
            }
        }
        out.push_str(&format!("verdict: {}\n", self.verdict));
        out
    }
}

/// FNV-1a, 64-bit, rendered as fixed-width hex.
pub fn fnv64_digest(bytes: &[u8]) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x1000_0000_01b3);
    }
    format!("fnv1a:{hash:016x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_timing_segregation() {
        let mut report = RunReport::new("verify-all", BTreeMap::new(), fnv64_digest(b"x"));
        report.push(
            CheckRecord {
                name: "demo".to_string(),
                description: "demo check".to_string(),
                passed: true,
                details: vec!["1/2".to_string()],
            },
            42,
        );
        let json = report.to_json();
        assert!(!json.contains("42"), "timings must not be serialized");
        let back = RunReport::from_json(&json).unwrap();
        assert_eq!(back.checks, report.checks);
        assert_eq!(back.verdict, "pass");
        assert!(back.timings_ms.is_empty());
        // Text form carries the timing.
        assert!(report.to_text().contains("(42 ms)"));
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(fnv64_digest(b"abc"), fnv64_digest(b"abc"));
        assert_ne!(fnv64_digest(b"abc"), fnv64_digest(b"abd"));
    }
}
