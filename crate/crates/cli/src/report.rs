//! The JSON envelope every command prints.

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Field order is fixed; identical inputs give identical reports apart from
/// `wall_time_seconds`.
#[derive(Debug, Serialize)]
pub struct RunReport<T: Serialize> {
    pub command: String,
    pub inputs_digest: String,
    pub results: T,
    pub tool_version: &'static str,
    pub wall_time_seconds: f64,
}

impl<T: Serialize> RunReport<T> {
    pub fn new(command: String, inputs: &serde_json::Value, results: T, wall_time_seconds: f64) -> Self {
        RunReport {
            command,
            inputs_digest: digest(inputs),
            results,
            tool_version: env!("CARGO_PKG_VERSION"),
            wall_time_seconds,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// `sha256:<hex>` of the compact JSON rendering of `inputs`.
pub fn digest(inputs: &serde_json::Value) -> String {
    let text = serde_json::to_string(inputs).expect("inputs serialise");
    format!("sha256:{}", hex::encode(Sha256::digest(text.as_bytes())))
}

/// Renders rows as CSV with the given header.
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}
