//! Machine-readable run reports.

use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(path: &str, bytes: &[u8]) -> Self {
        let digest = Sha256::digest(bytes);
        InputDigest {
            path: path.to_string(),
            sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        }
    }
}

/// Envelope written after the result records. Field order is fixed by the
/// struct definition.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
    pub exit_code: i32,
    pub summary: BTreeMap<String, serde_json::Value>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    JsonLines,
}

/// Collects text lines and structured records; renders one or the other.
#[derive(Debug, Default)]
pub struct Output {
    pub lines: Vec<String>,
    pub records: Vec<serde_json::Value>,
}

impl Output {
    pub fn line(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    pub fn record(&mut self, value: impl Serialize) {
        self.records
            .push(serde_json::to_value(value).expect("report values serialize"));
    }

    /// Text mode prints the lines; json-lines prints each record and then
    /// the report, one JSON object per line.
    pub fn render(&self, format: Format, report: &RunReport) -> String {
        let mut out = String::new();
        match format {
            Format::Text => {
                for l in &self.lines {
                    out.push_str(l);
                    out.push('\n');
                }
            }
            Format::JsonLines => {
                for r in &self.records {
                    out.push_str(&serde_json::to_string(r).expect("json"));
                    out.push('\n');
                }
                let mut envelope = serde_json::Map::new();
                envelope.insert("report".into(), serde_json::to_value(report).expect("json"));
                out.push_str(&serde_json::to_string(&envelope).expect("json"));
                out.push('\n');
            }
        }
        out
    }
}
