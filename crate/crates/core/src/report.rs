//! Machine-readable run reports.

use crate::groupoid::Groupoid;
use crate::semantics::{DefinableSet, Point, Structure};
use crate::syntax::{Context, SortId};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    /// Process exit code for a finished run.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 3,
        }
    }

    /// Failure dominates inconclusiveness, which dominates success.
    pub fn combine(self, other: Status) -> Status {
        match (self, other) {
            (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
            (Status::Inconclusive, _) | (_, Status::Inconclusive) => Status::Inconclusive,
            _ => Status::Pass,
        }
    }

    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Tool {
    pub name: String,
    pub version: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Input {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    pub detail: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub tool: Tool,
    pub command: String,
    pub inputs: Vec<Input>,
    pub bounds: BTreeMap<String, Value>,
    pub status: Status,
    pub checks: Vec<CheckResult>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            schema: SCHEMA_VERSION,
            tool: Tool {
                name: env!("CARGO_PKG_NAME").to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
            command: command.to_string(),
            inputs: Vec::new(),
            bounds: BTreeMap::new(),
            status: Status::Pass,
            checks: Vec::new(),
        }
    }

    pub fn input(&mut self, role: &str, path: &str, bytes: &[u8]) {
        self.inputs.push(Input {
            role: role.to_string(),
            path: path.to_string(),
            sha256: sha256_hex(bytes),
        });
    }

    pub fn bound(&mut self, name: &str, value: impl Into<Value>) {
        self.bounds.insert(name.to_string(), value.into());
    }

    pub fn push(&mut self, name: &str, status: Status, detail: Value) {
        self.status = self.status.combine(status);
        self.checks.push(CheckResult {
            name: name.to_string(),
            status,
            detail,
        });
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// `{"object": id, "tuple": [names]}`.
pub fn point_json(g: &Groupoid, sorts: &[SortId], p: &Point) -> Value {
    let m = g.object(p.object);
    serde_json::json!({ "object": m.id, "tuple": m.show_tuple(sorts, &p.tuple) })
}

/// `M: (a, b)`.
pub fn show_point(g: &Groupoid, sorts: &[SortId], p: &Point) -> String {
    let m = g.object(p.object);
    format!("{}: ({})", m.id, m.show_tuple(sorts, &p.tuple).join(", "))
}

pub fn definable_json(g: &Groupoid, d: &DefinableSet) -> Value {
    let sorts = context_sorts(g, &d.context);
    Value::Array(d.members.iter().map(|p| point_json(g, &sorts, p)).collect())
}

pub fn context_sorts(g: &Groupoid, c: &Context) -> Vec<SortId> {
    c.sort_ids(g.signature()).unwrap_or_default()
}

/// Carriers per sort and relation tuples by element name.
pub fn structure_json(m: &Structure) -> Value {
    let sig = m.signature();
    let carriers: BTreeMap<&str, &[String]> =
        sig.sorts.iter().enumerate().map(|(s, name)| (name.as_str(), m.carrier(s))).collect();
    let relations: BTreeMap<&str, Vec<Vec<String>>> = sig
        .relations
        .iter()
        .enumerate()
        .map(|(r, sym)| {
            let rows = m.relation(r).tuples().iter().map(|t| m.show_tuple(&sym.arity, t)).collect();
            (sym.name.as_str(), rows)
        })
        .collect();
    serde_json::json!({ "id": m.id, "carrier": carriers, "relations": relations })
}
