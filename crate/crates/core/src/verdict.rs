//! Tri-state outcomes of the checks run against a finite window.

use serde::{Deserialize, Serialize};

use crate::ring::WindowDeg;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Inconclusive,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// Worst of two verdicts (fail beats inconclusive beats pass).
    pub fn and(self, o: Verdict) -> Verdict {
        self.max(o)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Fail => "fail",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One named check with its outcome.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub anchor: String,
    pub verdict: Verdict,
    pub witness: Option<String>,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, anchor: impl Into<String>, verdict: Verdict) -> Self {
        Check {
            name: name.into(),
            anchor: anchor.into(),
            verdict,
            witness: None,
            detail: String::new(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn with_witness(mut self, witness: Option<String>) -> Self {
        self.witness = witness;
        self
    }
}

/// Combines the degrees of a bound `lhs <= rhs`.
///
/// A violation seen in the window is a failure only if the right-hand side is
/// certified; otherwise it is inconclusive.
pub fn bound_verdict(lhs: Option<i64>, rhs: Option<i64>, rhs_certified: bool) -> Verdict {
    if lhs <= rhs {
        Verdict::Pass
    } else if rhs_certified {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    }
}

/// `a + b` on degrees, with `None` standing for minus infinity.
pub fn deg_add(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    Some(a? + b?)
}

pub fn deg_of(d: &WindowDeg) -> Option<i64> {
    d.value.map(|v| v as i64)
}

pub fn fmt_deg(d: Option<i64>) -> String {
    d.map_or("-inf".to_string(), |v| v.to_string())
}
