//! Report envelope shared by the CLI subcommands.

use serde::Serialize;
use serde_json::Value;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    /// Passes when `value <= tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            passed: value <= tolerance,
            value,
            tolerance,
            detail: None,
        }
    }

    pub fn flag(name: impl Into<String>, passed: bool) -> Self {
        Check {
            name: name.into(),
            passed,
            value: if passed { 0.0 } else { 1.0 },
            tolerance: 0.0,
            detail: None,
        }
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub config: Value,
    pub checks: Vec<Check>,
    pub data: Value,
    pub failures: Vec<String>,
    pub passed: bool,
}

impl Report {
    pub fn new(command: impl Into<String>, seed: u64, config: Value) -> Self {
        Report {
            tool: "weylbench",
            version: VERSION,
            command: command.into(),
            seed,
            config,
            checks: Vec::new(),
            data: Value::Object(Default::default()),
            failures: Vec::new(),
            passed: true,
        }
    }

    pub fn push(&mut self, c: Check) {
        if !c.passed {
            self.failures.push(c.name.clone());
            self.passed = false;
        }
        self.checks.push(c);
    }

    pub fn set(&mut self, key: &str, v: impl Serialize) {
        if let Value::Object(m) = &mut self.data {
            m.insert(key.to_string(), serde_json::to_value(v).expect("serializable"));
        }
    }
}
