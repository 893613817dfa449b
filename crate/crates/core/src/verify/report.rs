use std::time::Duration;

use serde_json::{json, Map, Value};

/// One named check. A failing check always carries a witness.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: Value,
    pub witness: Option<Value>,
}

impl Check {
    pub fn pass(name: impl Into<String>, detail: Value) -> Self {
        Check { name: name.into(), passed: true, detail, witness: None }
    }

    pub fn fail(name: impl Into<String>, detail: Value, witness: Value) -> Self {
        Check { name: name.into(), passed: false, detail, witness: Some(witness) }
    }

    /// Passes iff `witness` is `None`.
    pub fn from_witness(name: impl Into<String>, detail: Value, witness: Option<Value>) -> Self {
        match witness {
            None => Self::pass(name, detail),
            Some(w) => Self::fail(name, detail, w),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "passed": self.passed,
            "detail": self.detail,
            "witness": self.witness.clone().unwrap_or(Value::Null),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub suite: String,
    pub subject: Value,
    pub checks: Vec<Check>,
    pub elapsed: Option<Duration>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>, subject: Value) -> Self {
        VerificationReport { suite: suite.into(), subject, checks: Vec::new(), elapsed: None }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Timing is left out unless asked for, so identical runs serialize identically.
    pub fn to_json(&self, with_timing: bool) -> Value {
        let mut m = Map::new();
        m.insert("suite".into(), json!(self.suite));
        m.insert("subject".into(), self.subject.clone());
        m.insert("passed".into(), json!(self.passed()));
        m.insert("checks".into(), Value::Array(self.checks.iter().map(Check::to_json).collect()));
        if with_timing {
            if let Some(e) = self.elapsed {
                m.insert("elapsed_ms".into(), json!(e.as_millis() as u64));
            }
        }
        Value::Object(m)
    }
}
