//! One report type rendered two ways.
//!
//! Every verb fills a [`Report`]: an ordered header, ordered fact entries,
//! and a list of named checks.  The plain-text and JSON renderings are both
//! derived from that one structure, so the two outputs cannot disagree, and
//! the process exit code is a function of the checks alone: any failed check
//! exits 1, otherwise any inconclusive check or entry exits 3, otherwise 0.
//! Inconclusive searches are always reported, never silently dropped.

use bilform::{Mat, Scalar};
use serde_json::{Map, Value};

/// Search-outcome vocabulary used by status entries.
pub const FOUND: &str = "found";
pub const PROVABLY_NONE: &str = "provably-none";
pub const INCONCLUSIVE: &str = "inconclusive";

#[derive(Clone)]
pub enum Entry {
    Bool(bool),
    Int(i64),
    Text(String),
    /// One of [`FOUND`], [`PROVABLY_NONE`], [`INCONCLUSIVE`].
    Status(&'static str),
    Matrix(Vec<Vec<String>>),
    List(Vec<String>),
}

#[derive(Clone, Copy, PartialEq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

impl CheckStatus {
    fn as_str(self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Inconclusive => INCONCLUSIVE,
        }
    }
}

pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub detail: Option<String>,
}

pub struct Report {
    pub command: String,
    pub subject: Vec<(String, String)>,
    pub entries: Vec<(String, Entry)>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(command: &str) -> Report {
        Report {
            command: command.to_string(),
            subject: Vec::new(),
            entries: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn subject(&mut self, key: &str, value: impl ToString) {
        self.subject.push((key.to_string(), value.to_string()));
    }

    pub fn entry(&mut self, key: &str, e: Entry) {
        self.entries.push((key.to_string(), e));
    }

    pub fn bool_entry(&mut self, key: &str, v: bool) {
        self.entry(key, Entry::Bool(v));
    }

    pub fn int_entry(&mut self, key: &str, v: usize) {
        self.entry(key, Entry::Int(v as i64));
    }

    pub fn text_entry(&mut self, key: &str, v: impl ToString) {
        self.entry(key, Entry::Text(v.to_string()));
    }

    pub fn status_entry(&mut self, key: &str, v: &'static str) {
        self.entry(key, Entry::Status(v));
    }

    pub fn matrix_entry(&mut self, key: &str, m: &Mat) {
        let rows = (0..m.rows)
            .map(|i| (0..m.cols).map(|j| m.at(i, j).to_string()).collect())
            .collect();
        self.entry(key, Entry::Matrix(rows));
    }

    pub fn vector_entry(&mut self, key: &str, v: &[Scalar]) {
        self.entry(key, Entry::List(v.iter().map(|s| s.to_string()).collect()));
    }

    pub fn check(&mut self, name: &str, ok: bool, detail: Option<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            detail,
        });
    }

    pub fn check_inconclusive(&mut self, name: &str, detail: Option<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            status: CheckStatus::Inconclusive,
            detail,
        });
    }

    fn outcome(&self) -> &'static str {
        if self.checks.iter().any(|c| c.status == CheckStatus::Fail) {
            return "fail";
        }
        let undecided = self
            .checks
            .iter()
            .any(|c| c.status == CheckStatus::Inconclusive)
            || self
                .entries
                .iter()
                .any(|(_, e)| matches!(e, Entry::Status(INCONCLUSIVE)));
        if undecided {
            INCONCLUSIVE
        } else {
            "pass"
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.outcome() {
            "fail" => 1,
            "pass" => 0,
            _ => 3,
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("== {} ==\n", self.command));
        for (k, v) in &self.subject {
            out.push_str(&format!("{k}: {v}\n"));
        }
        if !self.entries.is_empty() {
            out.push('\n');
        }
        for (k, e) in &self.entries {
            match e {
                Entry::Bool(v) => out.push_str(&format!("{k}: {v}\n")),
                Entry::Int(v) => out.push_str(&format!("{k}: {v}\n")),
                Entry::Text(v) => out.push_str(&format!("{k}: {v}\n")),
                Entry::Status(v) => out.push_str(&format!("{k}: {v}\n")),
                Entry::Matrix(rows) => {
                    out.push_str(&format!("{k}: {}x{}\n", rows.len(), rows.first().map_or(0, Vec::len)));
                    for row in rows {
                        out.push_str(&format!("  {}\n", row.join(" ")));
                    }
                }
                Entry::List(items) => {
                    out.push_str(&format!("{k}: {} items\n", items.len()));
                    for item in items {
                        out.push_str(&format!("  {item}\n"));
                    }
                }
            }
        }
        if !self.checks.is_empty() {
            out.push('\n');
        }
        for c in &self.checks {
            match &c.detail {
                Some(d) => out.push_str(&format!("check {}: {} — {d}\n", c.name, c.status.as_str())),
                None => out.push_str(&format!("check {}: {}\n", c.name, c.status.as_str())),
            }
        }
        out.push_str(&format!("\nresult: {}\n", self.outcome()));
        out
    }

    pub fn render_json(&self) -> String {
        let mut root = Map::new();
        root.insert("command".into(), Value::String(self.command.clone()));
        let mut subject = Map::new();
        for (k, v) in &self.subject {
            subject.insert(k.clone(), Value::String(v.clone()));
        }
        root.insert("subject".into(), Value::Object(subject));
        let mut entries = Map::new();
        for (k, e) in &self.entries {
            let v = match e {
                Entry::Bool(b) => Value::Bool(*b),
                Entry::Int(i) => Value::from(*i),
                Entry::Text(s) => Value::String(s.clone()),
                Entry::Status(s) => Value::String((*s).to_string()),
                Entry::Matrix(rows) => Value::Array(
                    rows.iter()
                        .map(|r| {
                            Value::Array(r.iter().map(|s| Value::String(s.clone())).collect())
                        })
                        .collect(),
                ),
                Entry::List(items) => Value::Array(
                    items.iter().map(|s| Value::String(s.clone())).collect(),
                ),
            };
            entries.insert(k.clone(), v);
        }
        root.insert("entries".into(), Value::Object(entries));
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                let mut o = Map::new();
                o.insert("name".into(), Value::String(c.name.clone()));
                o.insert("status".into(), Value::String(c.status.as_str().to_string()));
                if let Some(d) = &c.detail {
                    o.insert("detail".into(), Value::String(d.clone()));
                }
                Value::Object(o)
            })
            .collect();
        root.insert("checks".into(), Value::Array(checks));
        root.insert("result".into(), Value::String(self.outcome().to_string()));
        serde_json::to_string_pretty(&Value::Object(root)).expect("report values serialize")
    }
}
