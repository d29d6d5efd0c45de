use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

/// Outcome of a single certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub name: String,
    pub status: Status,
    /// Canonical text of the residual; `0` when the identity holds.
    pub residual: String,
}

impl Certificate {
    pub fn new(name: impl Into<String>, status: Status, residual: impl Into<String>) -> Self {
        Certificate {
            name: name.into(),
            status,
            residual: residual.into(),
        }
    }

    pub fn check(name: impl Into<String>, ok: bool, residual: impl Into<String>) -> Self {
        Certificate::new(name, Status::from_bool(ok), residual)
    }
}

/// Structured result of one CLI task.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub task: String,
    pub inputs: BTreeMap<String, String>,
    pub certificates: Vec<Certificate>,
    pub values: BTreeMap<String, Json>,
    pub notes: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl Report {
    pub fn new(task: impl Into<String>) -> Self {
        Report {
            task: task.into(),
            ..Report::default()
        }
    }

    pub fn input(&mut self, k: impl Into<String>, v: impl Into<String>) {
        self.inputs.insert(k.into(), v.into());
    }

    pub fn value(&mut self, k: impl Into<String>, v: impl Into<Json>) {
        self.values.insert(k.into(), v.into());
    }

    pub fn push(&mut self, c: Certificate) {
        self.certificates.push(c);
    }

    pub fn note(&mut self, n: impl Into<String>) {
        self.notes.push(n.into());
    }

    /// Worst status: any fail wins, then inconclusive.
    pub fn status(&self) -> Status {
        self.certificates
            .iter()
            .map(|c| c.status)
            .max_by_key(|s| match s {
                Status::Pass => 0,
                Status::Inconclusive => 1,
                Status::Fail => 2,
            })
            .unwrap_or(Status::Pass)
    }
}

fn text_value(v: &Json, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Json::Object(m) => {
            for (k, v) in m {
                match v {
                    Json::Object(_) | Json::Array(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        text_value(v, indent + 2, out);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", scalar_text(v))),
                }
            }
        }
        Json::Array(a) => {
            for v in a {
                match v {
                    Json::Object(_) | Json::Array(_) => {
                        out.push_str(&format!("{pad}-\n"));
                        text_value(v, indent + 2, out);
                    }
                    _ => out.push_str(&format!("{pad}- {}\n", scalar_text(v))),
                }
            }
        }
        _ => out.push_str(&format!("{pad}{}\n", scalar_text(v))),
    }
}

fn scalar_text(v: &Json) -> String {
    match v {
        Json::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Serializes a report. Output is byte-identical for identical reports.
pub fn emit_report(r: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("report serializes");
            s.push('\n');
            s.into_bytes()
        }
        Format::Text => {
            let mut out = format!("task: {}\n", r.task);
            out.push_str("inputs:\n");
            for (k, v) in &r.inputs {
                out.push_str(&format!("  {k}: {v}\n"));
            }
            out.push_str("certificates:\n");
            for c in &r.certificates {
                out.push_str(&format!("  [{}] {}", c.status.as_str(), c.name));
                if c.status != Status::Pass {
                    out.push_str(&format!(" residual: {}", c.residual));
                }
                out.push('\n');
            }
            out.push_str("values:\n");
            text_value(&Json::Object(r.values.clone().into_iter().collect()), 2, &mut out);
            if !r.notes.is_empty() {
                out.push_str("notes:\n");
                for n in &r.notes {
                    out.push_str(&format!("  - {n}\n"));
                }
            }
            out.into_bytes()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_is_valid_json() {
        let r = Report::new("mops");
        let bytes = emit_report(&r, Format::Json);
        let v: Json = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(v["certificates"], Json::Array(vec![]));
        let back: Report = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(emit_report(&back, Format::Json), bytes);
    }

    #[test]
    fn status_is_worst_case() {
        let mut r = Report::new("t");
        r.push(Certificate::check("a", true, "0"));
        r.push(Certificate::new("b", Status::Inconclusive, "window"));
        assert_eq!(r.status(), Status::Inconclusive);
        r.push(Certificate::check("c", false, "x"));
        assert_eq!(r.status(), Status::Fail);
    }
}
