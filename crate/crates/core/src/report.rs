//! Checker reports rendered as text or JSON. Identical inputs give identical
//! bytes: no timings, and every list keeps its construction order.

use std::fmt::Write;

use serde::Serialize;

use crate::verdict::{Residual, Verdict};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residuals: Vec<Residual>,
}

/// Named rows `lhs = rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Table {
    pub name: String,
    pub rows: Vec<(String, String)>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub command: String,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub tables: Vec<Table>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub document: Option<String>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.to_string(), ..Report::default() }
    }

    pub fn check(&mut self, name: impl Into<String>, v: &Verdict) -> bool {
        let passed = v.passed();
        self.checks.push(Check { name: name.into(), passed, residuals: v.residuals.clone() });
        passed
    }

    pub fn table(&mut self, name: impl Into<String>, rows: Vec<(String, String)>) {
        self.tables.push(Table { name: name.into(), rows });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Plain text. When a document is attached, everything else is written
    /// as `#` comments so that the output still parses.
    pub fn to_text(&self) -> String {
        let mut head = String::new();
        writeln!(head, "command: {}", self.command).unwrap();
        for c in &self.checks {
            writeln!(head, "{}: {}", c.name, if c.passed { "PASS" } else { "FAIL" }).unwrap();
            for r in &c.residuals {
                writeln!(head, "  {}: {}", r.label, r.value).unwrap();
            }
        }
        for t in &self.tables {
            writeln!(head, "{}:", t.name).unwrap();
            for (l, r) in &t.rows {
                writeln!(head, "  {l} = {r}").unwrap();
            }
        }
        for w in &self.warnings {
            writeln!(head, "warning: {w}").unwrap();
        }
        match &self.document {
            None => head,
            Some(doc) => {
                let mut out: String = head.lines().map(|l| format!("# {l}\n")).collect();
                out.push_str(doc);
                out
            }
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
