//! Pass/fail flags attached to the JSON reports.

use std::fmt;

use num_bigint::BigUint;
use serde::{Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Informational comparison that never fails a run.
    ReportedOnly,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, ok: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.to_string(),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            detail: detail.into(),
        }
    }

    pub fn reported(name: &str, detail: impl Into<String>) -> Self {
        Check { name: name.to_string(), status: CheckStatus::ReportedOnly, detail: detail.into() }
    }

    pub fn not_applicable(name: &str, detail: impl Into<String>) -> Self {
        Check { name: name.to_string(), status: CheckStatus::NotApplicable, detail: detail.into() }
    }

    pub fn failed(&self) -> bool {
        self.status == CheckStatus::Fail
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::ReportedOnly => "INFO",
            CheckStatus::NotApplicable => "N/A ",
        };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| !c.failed())
}

/// Serializes as a JSON number when it fits in `u64`, otherwise as a decimal string.
pub fn serialize_big<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    match u64::try_from(n) {
        Ok(v) => s.serialize_u64(v),
        Err(_) => s.serialize_str(&n.to_string()),
    }
}

pub fn serialize_big_opt<S: Serializer>(n: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match n {
        Some(n) => serialize_big(n, s),
        None => s.serialize_none(),
    }
}
