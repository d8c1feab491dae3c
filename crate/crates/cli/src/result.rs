use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

/// A record value: a dimension/count or a group or verdict string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
    pub value: Value,
}

impl Record {
    pub fn new(i: Option<i64>, n: Option<i64>, value: impl Into<Value>) -> Self {
        Record { i, n, value: value.into() }
    }

    pub fn at(i: i64, n: i64, value: impl Into<Value>) -> Self {
        Self::new(Some(i), Some(n), value)
    }

    pub fn degree(i: i64, value: impl Into<Value>) -> Self {
        Self::new(Some(i), None, value)
    }

    pub fn index(n: i64, value: impl Into<Value>) -> Self {
        Self::new(None, Some(n), value)
    }

    pub fn note(value: impl Into<Value>) -> Self {
        Self::new(None, None, value)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Status::Pass
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub experiment: String,
    pub params: BTreeMap<String, Json>,
    pub results: Vec<Record>,
    pub status: Status,
    pub wall_ms: u64,
}

impl ExperimentResult {
    pub fn new(experiment: &str, params: BTreeMap<String, Json>) -> Self {
        ExperimentResult { experiment: experiment.to_string(), params, results: Vec::new(), status: Status::Pass, wall_ms: 0 }
    }

    pub fn push(&mut self, record: Record) {
        self.results.push(record);
    }

    /// Marks the result failed unless `ok`; records `what` as a verdict note.
    pub fn check(&mut self, ok: bool, what: impl fmt::Display) {
        self.results.push(Record::note(format!("{what}: {}", Status::from_bool(ok))));
        if !ok {
            self.status = Status::Fail;
        }
    }

    pub fn passed(&self) -> bool {
        self.status.is_pass()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serialises")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

/// Builds a params map from `(key, value)` pairs.
#[macro_export]
macro_rules! params {
    ($($k:expr => $v:expr),* $(,)?) => {{
        #[allow(unused_mut)]
        let mut m = ::std::collections::BTreeMap::<String, ::serde_json::Value>::new();
        $( m.insert($k.to_string(), ::serde_json::json!($v)); )*
        m
    }};
}
