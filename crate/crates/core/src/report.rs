//! Check records shared by the verification suites.

use serde::{Deserialize, Serialize};

/// One numeric check `lhs ⋈ rhs` with its tolerance and outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub instance: String,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRecord {
    /// `|lhs − rhs| ≤ tolerance`.
    pub fn close(name: &str, instance: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self::new(name, instance, lhs, rhs, tolerance, (lhs - rhs).abs() <= tolerance)
    }

    /// `lhs ≤ rhs + tolerance`.
    pub fn at_most(name: &str, instance: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self::new(name, instance, lhs, rhs, tolerance, lhs <= rhs + tolerance)
    }

    /// `lhs ≥ rhs − tolerance`.
    pub fn at_least(name: &str, instance: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self::new(name, instance, lhs, rhs, tolerance, lhs >= rhs - tolerance)
    }

    pub fn new(
        name: &str,
        instance: impl Into<String>,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
        pass: bool,
    ) -> Self {
        Self { name: name.to_string(), instance: instance.into(), lhs, rhs, tolerance, pass }
    }
}

/// All records pass.
pub fn all_pass(records: &[CheckRecord]) -> bool {
    records.iter().all(|r| r.pass)
}
