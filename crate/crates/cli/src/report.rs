//! JSON report schema shared by the subcommands.

use serde::Serialize;
use serde_json::{Map, Value};

pub const TOOL_VERSION: &str = concat!("deltawell ", env!("CARGO_PKG_VERSION"));

/// One named number, the method that produced it and the tolerance it was
/// checked against. Values that are only reported carry the tolerance they
/// were computed to and `passed: true`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Entry {
    pub name: String,
    pub value: f64,
    pub method: String,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool_version: String,
    pub timestamp: String,
    pub command: String,
    pub inputs: Map<String, Value>,
    pub results: Vec<Entry>,
    pub warnings: Vec<String>,
    pub passed: bool,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            tool_version: TOOL_VERSION.to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            command: command.to_string(),
            inputs: Map::new(),
            results: Vec::new(),
            warnings: Vec::new(),
            passed: true,
        }
    }

    pub fn input(&mut self, name: &str, value: impl Into<Value>) -> &mut Self {
        self.inputs.insert(name.to_string(), value.into());
        self
    }

    pub fn check(&mut self, name: impl Into<String>, value: f64, method: &str, tolerance: f64, passed: bool) {
        let passed = passed && !value.is_nan();
        self.passed &= passed;
        self.results.push(Entry { name: name.into(), value, method: method.to_string(), tolerance, passed });
    }

    pub fn value(&mut self, name: impl Into<String>, value: f64, method: &str, tolerance: f64) {
        self.check(name, value, method, tolerance, true);
    }

    /// Records a computation that could not be completed.
    pub fn failure(&mut self, name: impl Into<String>, method: &str, tolerance: f64, error: impl std::fmt::Display) {
        let name = name.into();
        self.warnings.push(format!("{name}: {error}"));
        self.check(name, f64::NAN, method, tolerance, false);
    }

    pub fn warn(&mut self, warning: impl Into<String>) {
        self.warnings.push(warning.into());
    }

    pub fn get(&self, name: &str) -> Option<&Entry> {
        self.results.iter().find(|e| e.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
