use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Default relative tolerance on inequality margins.
pub const DEFAULT_MARGIN_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    PreconditionUnmet,
    Fail,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::PreconditionUnmet => "PRECONDITION_UNMET",
            Status::Fail => "FAIL",
        }
    }

    /// Combined status of several results: any FAIL wins, then any unmet
    /// precondition.
    pub fn worst(items: impl IntoIterator<Item = Status>) -> Status {
        items.into_iter().max().unwrap_or(Status::Pass)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// `lhs <= rhs`
    Inequality,
    /// `lhs == rhs`
    Equality,
}

/// Both sides of one checked estimate at one evaluation time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InequalityResult {
    pub check_id: String,
    pub eval_time: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`
    pub margin: f64,
    pub status: Status,
    pub tolerance: f64,
    pub kind: CheckKind,
    /// Named constants entering `rhs`.
    pub constants: BTreeMap<String, f64>,
    pub note: Option<String>,
}

impl InequalityResult {
    pub fn scale(lhs: f64, rhs: f64) -> f64 {
        1f64.max(lhs.abs()).max(rhs.abs())
    }

    pub fn inequality(check_id: &str, eval_time: f64, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self::build(check_id, eval_time, lhs, rhs, tolerance, CheckKind::Inequality)
    }

    pub fn equality(check_id: &str, eval_time: f64, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self::build(check_id, eval_time, lhs, rhs, tolerance, CheckKind::Equality)
    }

    fn build(check_id: &str, eval_time: f64, lhs: f64, rhs: f64, tolerance: f64, kind: CheckKind) -> Self {
        let margin = rhs - lhs;
        let allowed = tolerance * Self::scale(lhs, rhs);
        let ok = match kind {
            CheckKind::Inequality => margin >= -allowed,
            CheckKind::Equality => margin.abs() <= allowed,
        };
        Self {
            check_id: check_id.to_string(),
            eval_time,
            lhs,
            rhs,
            margin,
            status: if ok { Status::Pass } else { Status::Fail },
            tolerance,
            kind,
            constants: BTreeMap::new(),
            note: None,
        }
    }

    pub fn unmet(check_id: &str, eval_time: f64, tolerance: f64, reason: impl Into<String>) -> Self {
        Self {
            check_id: check_id.to_string(),
            eval_time,
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            status: Status::PreconditionUnmet,
            tolerance,
            kind: CheckKind::Inequality,
            constants: BTreeMap::new(),
            note: Some(reason.into()),
        }
    }

    pub fn with_constant(mut self, name: &str, value: f64) -> Self {
        self.constants.insert(name.to_string(), value);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// `margin / scale`, the quantity compared against the tolerance.
    pub fn relative_margin(&self) -> f64 {
        self.margin / Self::scale(self.lhs, self.rhs)
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// The result with the smallest relative margin; ties keep the earliest.
pub(crate) fn worst_of(results: Vec<InequalityResult>) -> Option<InequalityResult> {
    let key = |r: &InequalityResult| match r.kind {
        CheckKind::Inequality => r.relative_margin(),
        CheckKind::Equality => -r.relative_margin().abs(),
    };
    results.into_iter().reduce(|a, b| {
        let (ka, kb) = (key(&a), key(&b));
        if kb < ka || (ka.is_nan() && !kb.is_nan()) {
            b
        } else {
            a
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_rule() {
        assert!(InequalityResult::inequality("x", 0.0, 1.0, 1.0, 0.0).passed());
        assert!(InequalityResult::inequality("x", 0.0, 1.0 + 1e-8, 1.0, 1e-7).passed());
        assert!(!InequalityResult::inequality("x", 0.0, 1.0 + 1e-6, 1.0, 1e-7).passed());
        // scale floor of 1
        assert!(InequalityResult::inequality("x", 0.0, 5e-8, 0.0, 1e-7).passed());
        let big = InequalityResult::inequality("x", 0.0, 1e9 + 50.0, 1e9, 1e-7);
        assert!(big.passed());
        assert!(!InequalityResult::equality("x", 0.0, 1.0, 1.5, 0.1).passed());
        assert!(InequalityResult::equality("x", 0.0, 1.0, 1.05, 0.1).passed());
        assert!(!InequalityResult::equality("x", 0.0, 1.0, 1.0 + 1e-15, 0.0).passed());
    }

    #[test]
    fn worst_status() {
        use Status::*;
        assert_eq!(Status::worst([Pass, Pass]), Pass);
        assert_eq!(Status::worst([Pass, PreconditionUnmet]), PreconditionUnmet);
        assert_eq!(Status::worst([Fail, PreconditionUnmet, Pass]), Fail);
        assert_eq!(Status::worst([]), Pass);
    }

    #[test]
    fn worst_picks_smallest_relative_margin() {
        let r = worst_of(vec![
            InequalityResult::inequality("a", 0.0, 1.0, 3.0, 0.0),
            InequalityResult::inequality("b", 1.0, 1.0, 1.5, 0.0),
            InequalityResult::inequality("c", 2.0, 1.0, 2.0, 0.0),
        ])
        .unwrap();
        assert_eq!(r.check_id, "b");
    }
}
