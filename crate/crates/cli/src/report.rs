//! Versioned JSON report with a hashed body.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const REPORT_SCHEMA: &str = "eventloc.report/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub scenario: String,
    /// Deterministic content; `body_sha256` is taken over its compact JSON encoding.
    pub body: serde_json::Value,
    pub body_sha256: String,
    /// Timings and host details, excluded from the hash.
    pub meta: serde_json::Value,
}

impl Report {
    pub fn new(scenario: &str, body: serde_json::Value, meta: serde_json::Value) -> Self {
        let body_sha256 = digest(&body);
        Self { schema: REPORT_SCHEMA.into(), scenario: scenario.into(), body, body_sha256, meta }
    }

    /// True when the stored hash matches the body.
    pub fn verify(&self) -> bool {
        digest(&self.body) == self.body_sha256
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn digest(body: &serde_json::Value) -> String {
    let bytes = serde_json::to_vec(body).expect("body serializes");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}
