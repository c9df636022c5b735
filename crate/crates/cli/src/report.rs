//! Deterministic verdict reports: JSON on standard output, with a plain
//! text rendering behind a flag. Identical inputs produce identical
//! reports except for the timing field.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<String, FileDigest>,
    pub params: Params,
    pub verdict: Value,
    pub timing_ms: u128,
}

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Params {
    pub budget: u64,
    pub seed: u64,
    pub tolerance: f64,
}

/// Records the argument file's digest under `role`; unreadable files are
/// skipped here and reported by the loader instead.
pub fn record_input(inputs: &mut BTreeMap<String, FileDigest>, role: &str, path: &Path) {
    if let Ok(bytes) = std::fs::read(path) {
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        inputs.insert(
            role.to_string(),
            FileDigest {
                path: path.display().to_string(),
                sha256: format!("{:x}", hasher.finalize()),
            },
        );
    }
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports always serialize");
            s.push('\n');
            s
        }
        Format::Text => {
            let value = serde_json::to_value(report).expect("reports always serialize");
            let mut out = String::new();
            render_text(&value, 0, &mut out);
            out
        }
    }
}

fn render_text(value: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match value {
        Value::Object(map) => {
            for (key, inner) in map {
                if inner.is_object() || inner.is_array() {
                    out.push_str(&format!("{pad}{key}:\n"));
                    render_text(inner, indent + 1, out);
                } else {
                    out.push_str(&format!("{pad}{key}: {}\n", scalar(inner)));
                }
            }
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str(&format!("{pad}(none)\n"));
            }
            for inner in items {
                if inner.is_object() || inner.is_array() {
                    out.push_str(&format!("{pad}-\n"));
                    render_text(inner, indent + 1, out);
                } else {
                    out.push_str(&format!("{pad}- {}\n", scalar(inner)));
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other))),
    }
}

fn scalar(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
