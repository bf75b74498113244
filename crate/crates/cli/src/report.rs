//! Canonical reports. Objects are serialized with sorted keys, so the same
//! inputs always give the same bytes.

use std::fs;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

pub struct Report {
    command: &'static str,
    arguments: Map<String, Value>,
    inputs: Vec<Value>,
    result: Value,
    certificate: Option<Value>,
    verified: bool,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Reads an input file and records its digest.
pub fn read_input(report: &mut Report, role: &str, path: &str) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?;
    report.inputs.push(json!({ "role": role, "path": path, "sha256": sha256_hex(&bytes) }));
    String::from_utf8(bytes).map_err(|_| CliError::Parse(format!("{path} is not UTF-8")))
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report {
            command,
            arguments: Map::new(),
            inputs: Vec::new(),
            result: Value::Null,
            certificate: None,
            verified: true,
        }
    }

    pub fn arg(&mut self, name: &str, value: impl Into<Value>) -> &mut Self {
        self.arguments.insert(name.to_string(), value.into());
        self
    }

    pub fn result(&mut self, result: Value) -> &mut Self {
        self.result = result;
        self
    }

    pub fn certificate(&mut self, certificate: Value) -> &mut Self {
        self.certificate = Some(certificate);
        self
    }

    pub fn verified(&mut self, ok: bool) -> &mut Self {
        self.verified = ok;
        self
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    pub fn render(&self) -> String {
        let mut doc = json!({
            "command": self.command,
            "arguments": self.arguments,
            "inputs": self.inputs,
            "result": self.result,
            "verified": self.verified,
        });
        if let Some(c) = &self.certificate {
            doc["certificate"] = c.clone();
        }
        let mut text = serde_json::to_string_pretty(&doc).expect("reports serialize");
        text.push('\n');
        text
    }
}
