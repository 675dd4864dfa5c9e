use std::collections::BTreeMap;
use std::fmt;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use urnpde::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "OK")]
    Ok,
    #[serde(rename = "FAIL")]
    Fail,
}

impl Status {
    pub fn from_passed(passed: bool) -> Self {
        if passed {
            Status::Ok
        } else {
            Status::Fail
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "OK",
            Status::Fail => "FAIL",
        })
    }
}

/// One output line. Every field is optional so that distribution tables,
/// simulation reports and verification checks share a single column set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub label: Option<String>,
    pub k: Option<u64>,
    pub exact_num: Option<String>,
    pub exact_den: Option<String>,
    pub exact_float: Option<f64>,
    pub empirical: Option<f64>,
    pub approx: Option<f64>,
    pub deviation: Option<f64>,
    pub passed: Option<bool>,
    pub detail: Option<String>,
}

pub const COLUMNS: [&str; 10] = [
    "label",
    "k",
    "exact_num",
    "exact_den",
    "exact_float",
    "empirical",
    "approx",
    "deviation",
    "passed",
    "detail",
];

impl Row {
    pub fn labelled(label: impl Into<String>) -> Self {
        Self {
            label: Some(label.into()),
            ..Self::default()
        }
    }

    pub fn with_k(mut self, k: u64) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_exact(mut self, value: &Rational) -> Self {
        self.exact_num = Some(value.numer().to_string());
        self.exact_den = Some(value.denom().to_string());
        self.exact_float = value.to_f64();
        self
    }

    pub fn with_check(mut self, passed: bool, detail: impl Into<String>) -> Self {
        self.passed = Some(passed);
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub rows: Vec<Row>,
    pub status: Status,
    #[serde(default)]
    pub summary: BTreeMap<String, String>,
}

impl OutputRecord {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            params: BTreeMap::new(),
            rows: Vec::new(),
            status: Status::Ok,
            summary: BTreeMap::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.summary.insert(key.to_string(), value.to_string());
    }

    /// Sets the status from the `passed` flags of the rows.
    pub fn settle_status(&mut self) {
        let all = self.rows.iter().all(|r| r.passed != Some(false));
        self.status = Status::from_passed(all);
    }
}
