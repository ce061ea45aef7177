//! Verdict reports with JSON and text renderings.

use serde_json::{json, Map, Value};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    /// Concrete evidence for a failure (object, degree, matrix), or a short
    /// summary of what was checked.
    pub witness: Option<String>,
    /// Degrees through which the verdict is exact, for truncated constructions.
    pub safe_range: Option<(i64, i64)>,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool) -> Self {
        Check { name: name.into(), pass, witness: None, safe_range: None }
    }

    pub fn with_witness(mut self, w: impl Into<String>) -> Self {
        self.witness = Some(w.into());
        self
    }

    pub fn with_safe_range(mut self, lo: i64, hi: i64) -> Self {
        self.safe_range = Some((lo, hi));
        self
    }

    /// Pass, or fail with the given witness.
    pub fn from_failure(name: impl Into<String>, failure: Option<String>) -> Self {
        match failure {
            None => Check::new(name, true),
            Some(w) => Check::new(name, false).with_witness(w),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), json!(self.name));
        m.insert("pass".into(), json!(self.pass));
        if let Some(w) = &self.witness {
            m.insert("witness".into(), json!(w));
        }
        if let Some((lo, hi)) = self.safe_range {
            m.insert("safe_range".into(), json!([lo, hi]));
        }
        Value::Object(m)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub command: String,
    pub checks: Vec<Check>,
    /// Command output: homology tables, emitted workspaces, presentations.
    pub result: Map<String, Value>,
    /// Plain-text lines of the result, printed before the verdicts.
    pub lines: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.to_string(), ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, cs: impl IntoIterator<Item = Check>) {
        self.checks.extend(cs);
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "pass": self.passed(),
            "checks": self.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
            "result": Value::Object(self.result.clone()),
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        for c in &self.checks {
            out.push_str(if c.pass { "PASS " } else { "FAIL " });
            out.push_str(&c.name);
            if let Some((lo, hi)) = c.safe_range {
                out.push_str(&format!(" [exact in degrees {lo}..{hi}]"));
            }
            if let Some(w) = &c.witness {
                out.push_str(": ");
                out.push_str(w);
            }
            out.push('\n');
        }
        if !self.checks.is_empty() {
            let failed = self.checks.iter().filter(|c| !c.pass).count();
            out.push_str(&format!(
                "{}: {} checks, {} failed\n",
                if failed == 0 { "PASS" } else { "FAIL" },
                self.checks.len(),
                failed
            ));
        }
        out
    }
}
