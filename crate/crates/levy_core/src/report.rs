//! Structured pass/fail records for quantitative checks.
//!
//! Every audit in the workspace reduces to "a computed value against a
//! bound".  Keeping the record flat and serializable lets the CLI dump a
//! whole audit as JSON and lets tests assert on the same object the user
//! sees.

use serde::{Deserialize, Serialize};

/// Outcome of one quantitative check.
///
/// `value` is the computed quantity, `bound` the threshold it was compared
/// against, and `pass` the recorded verdict.  The direction of the
/// comparison is owned by the producer: a supremum check passes when
/// `value <= bound`, a lower-bound check when `value >= bound`.
/// `worst_point` optionally records where the extremum was attained
/// (radius, frequency, a (t, x) pair, ...) for diagnosis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
    pub worst_point: Option<Vec<f64>>,
}

impl CheckReport {
    /// Check that passes when `value <= bound`.
    pub fn upper(name: impl Into<String>, value: f64, bound: f64) -> Self {
        CheckReport {
            name: name.into(),
            value,
            bound,
            pass: value.is_finite() && value <= bound,
            worst_point: None,
        }
    }

    /// Check that passes when `value >= bound`.
    pub fn lower(name: impl Into<String>, value: f64, bound: f64) -> Self {
        CheckReport {
            name: name.into(),
            value,
            bound,
            pass: value.is_finite() && value >= bound,
            worst_point: None,
        }
    }

    /// Attach the location where the extremum was attained.
    pub fn at(mut self, point: Vec<f64>) -> Self {
        self.worst_point = Some(point);
        self
    }

    /// Force a failure verdict, e.g. when the underlying quantity is
    /// infinite and `value` only records a truncated proxy.
    pub fn failed(mut self) -> Self {
        self.pass = false;
        self
    }
}

impl std::fmt::Display for CheckReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: {} (value {:.6e}, bound {:.6e})",
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.value,
            self.bound
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upper_and_lower_directions() {
        assert!(CheckReport::upper("u", 1.0, 2.0).pass);
        assert!(!CheckReport::upper("u", 3.0, 2.0).pass);
        assert!(CheckReport::lower("l", 3.0, 2.0).pass);
        assert!(!CheckReport::lower("l", 1.0, 2.0).pass);
    }

    #[test]
    fn nan_never_passes() {
        assert!(!CheckReport::upper("u", f64::NAN, 2.0).pass);
        assert!(!CheckReport::lower("l", f64::NAN, 2.0).pass);
        assert!(!CheckReport::upper("u", f64::INFINITY, f64::INFINITY).pass);
    }

    #[test]
    fn json_round_trip() {
        let r = CheckReport::upper("moment_bound", 11.98, 12.5).at(vec![0.5, 2.0]);
        let s = serde_json::to_string(&r).unwrap();
        let back: CheckReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back.name, "moment_bound");
        assert_eq!(back.worst_point, Some(vec![0.5, 2.0]));
        assert!(back.pass);
    }
}
