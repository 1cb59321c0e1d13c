use ratquiver::report::{Check, Report};
use serde_json::{json, Value};

use crate::interchange::wrap;

#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Json(Value),
    Text(String),
}

/// What a subcommand produced: named checks, named outputs and an optional primary
/// document (the one `--out` writes).
#[derive(Debug, Clone, PartialEq)]
pub struct CliReport {
    pub command: String,
    pub checks: Vec<Check>,
    pub outputs: Vec<(String, Output)>,
    pub document: Option<Value>,
}

impl CliReport {
    pub fn new(command: impl Into<String>) -> Self {
        CliReport { command: command.into(), checks: Vec::new(), outputs: Vec::new(), document: None }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    pub fn extend(&mut self, prefix: &str, r: Report) {
        for c in r.checks {
            let name = if prefix.is_empty() { c.name } else { format!("{prefix}: {}", c.name) };
            self.checks.push(Check { name, ..c });
        }
    }

    pub fn json(&mut self, name: impl Into<String>, v: Value) {
        self.outputs.push((name.into(), Output::Json(v)));
    }

    pub fn text(&mut self, name: impl Into<String>, t: impl Into<String>) {
        self.outputs.push((name.into(), Output::Text(t.into())));
    }

    /// Records `doc` as the primary document and as a JSON output.
    pub fn document(&mut self, name: impl Into<String>, doc: Value) {
        self.json(name, doc.clone());
        self.document = Some(doc);
    }

    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> Value {
        let checks: Vec<Value> = self.checks.iter().map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail })).collect();
        let outputs: Vec<Value> = self
            .outputs
            .iter()
            .map(|(name, o)| match o {
                Output::Json(v) => json!({ "name": name, "json": v }),
                Output::Text(t) => json!({ "name": name, "text": t }),
            })
            .collect();
        wrap("report", json!({ "command": self.command, "ok": self.ok(), "checks": checks, "outputs": outputs }))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("command: {}\n", self.command);
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            if c.detail.is_empty() {
                s += &format!("{status} {}\n", c.name);
            } else {
                s += &format!("{status} {}: {}\n", c.name, c.detail);
            }
        }
        for (name, o) in &self.outputs {
            s += &format!("{name}:\n");
            let body = match o {
                Output::Json(v) => v.to_string(),
                Output::Text(t) => t.trim_end().to_string(),
            };
            for line in body.lines() {
                s += &format!("  {line}\n");
            }
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        if failed == 0 {
            s += &format!("result: ok ({} checks)\n", self.checks.len());
        } else {
            s += &format!("result: FAILED ({failed} of {} checks)\n", self.checks.len());
        }
        s
    }
}
