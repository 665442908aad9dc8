//! Machine-readable record of a single CLI run.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Everything needed to reproduce and consume one command invocation.
/// Maps are ordered so serialization is deterministic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub method: String,
    pub values: BTreeMap<String, String>,
    pub error_bound: String,
    pub wall_time_s: f64,
}

impl RunRecord {
    pub fn new(command: &str) -> Self {
        RunRecord {
            command: command.to_string(),
            params: BTreeMap::new(),
            seed: None,
            method: String::new(),
            values: BTreeMap::new(),
            error_bound: "exact".to_string(),
            wall_time_s: 0.0,
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn value(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.values.insert(key.to_string(), value.to_string());
        self
    }

    pub fn real(&mut self, key: &str, value: f64) -> &mut Self {
        self.values.insert(key.to_string(), fmt_real(value));
        self
    }
}

/// 17 significant digits; round-trips every f64 exactly.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}
