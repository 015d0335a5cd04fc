//! Machine-readable experiment outcome.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;
use crate::output::atomic_write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Warn,
    Fail,
}

impl Status {
    /// Process exit code: warnings do not fail a run.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass | Status::Warn => 0,
            Status::Fail => 1,
        }
    }

    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    /// Downgrades a pass to a warning.
    pub fn warn_if(self, cond: bool) -> Self {
        match self {
            Status::Pass if cond => Status::Warn,
            s => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub id: String,
    pub kind: String,
    pub status: Status,
    pub measured: BTreeMap<String, Value>,
    pub thresholds: BTreeMap<String, f64>,
    pub parameters: BTreeMap<String, Value>,
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn new(id: &str, kind: &str) -> Self {
        Self {
            id: id.to_string(),
            kind: kind.to_string(),
            status: Status::Pass,
            measured: BTreeMap::new(),
            thresholds: BTreeMap::new(),
            parameters: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn measure(&mut self, key: &str, value: impl Into<Value>) {
        self.measured.insert(key.to_string(), value.into());
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) {
        self.parameters.insert(key.to_string(), value.into());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("verdict serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        atomic_write(path, self.to_json().as_bytes())
    }
}
