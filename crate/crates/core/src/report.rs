use serde::{Deserialize, Serialize};

/// Maximum number of failure payloads kept per report; the failure count is
/// always exact.
pub const MAX_CASES: usize = 32;

/// One failed check inside a property run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureCase {
    pub trial: usize,
    pub check: String,
    pub violation: f64,
    pub threshold: f64,
    pub detail: String,
}

/// Seeded, reproducible outcome of a property suite.
///
/// `max_violation` is the largest measured deviation over every check that
/// ran, whether or not it crossed its threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub suite: String,
    pub metric: String,
    pub seed: u64,
    pub trials: usize,
    pub failures: usize,
    pub max_violation: f64,
    pub cases: Vec<FailureCase>,
}

impl PropertyReport {
    pub fn new(suite: impl Into<String>, metric: impl Into<String>, seed: u64) -> Self {
        Self {
            suite: suite.into(),
            metric: metric.into(),
            seed,
            trials: 0,
            failures: 0,
            max_violation: 0.0,
            cases: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    /// Records one check. Non-finite violations always fail and are stored as
    /// `f64::MAX` so the report stays serializable.
    pub fn check(
        &mut self,
        trial: usize,
        check: &str,
        violation: f64,
        threshold: f64,
        detail: impl FnOnce() -> String,
    ) -> bool {
        self.trials += 1;
        let v = if violation.is_finite() { violation } else { f64::MAX };
        if v > self.max_violation {
            self.max_violation = v;
        }
        let ok = violation.is_finite() && violation <= threshold;
        if !ok {
            self.fail(trial, check, v, threshold, detail());
        }
        ok
    }

    /// Records a check that could not be evaluated (e.g. an error was raised).
    pub fn error(&mut self, trial: usize, check: &str, detail: String) {
        self.trials += 1;
        self.max_violation = f64::MAX;
        self.fail(trial, check, f64::MAX, 0.0, detail);
    }

    fn fail(&mut self, trial: usize, check: &str, violation: f64, threshold: f64, detail: String) {
        self.failures += 1;
        if self.cases.len() < MAX_CASES {
            self.cases.push(FailureCase {
                trial,
                check: check.to_string(),
                violation,
                threshold,
                detail,
            });
        }
    }

    /// Appends `other` in order; counts add, violations take the max.
    pub fn absorb(&mut self, other: PropertyReport) {
        self.trials += other.trials;
        self.failures += other.failures;
        if other.max_violation > self.max_violation {
            self.max_violation = other.max_violation;
        }
        for case in other.cases {
            if self.cases.len() >= MAX_CASES {
                break;
            }
            self.cases.push(case);
        }
    }

    pub fn csv_header() -> &'static str {
        "suite,metric,seed,trials,failures,max_violation,status"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:.6e},{}",
            self.suite,
            self.metric,
            self.seed,
            self.trials,
            self.failures,
            self.max_violation,
            if self.passed() { "pass" } else { "FAIL" }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_violation_on_pass() {
        let mut r = PropertyReport::new("s", "m", 1);
        assert!(r.check(0, "c", 1e-13, 1e-12, String::new));
        assert_eq!(r.failures, 0);
        assert_eq!(r.max_violation, 1e-13);
        assert!(!r.check(1, "c", 1e-3, 1e-12, || "bad".into()));
        assert_eq!(r.failures, 1);
        assert_eq!(r.cases[0].detail, "bad");
    }

    #[test]
    fn nan_fails_and_serializes() {
        let mut r = PropertyReport::new("s", "m", 1);
        assert!(!r.check(0, "c", f64::NAN, 1.0, String::new));
        let json = serde_json::to_string(&r).unwrap();
        let back: PropertyReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn absorb_keeps_order_and_caps_cases() {
        let mut a = PropertyReport::new("s", "m", 1);
        for i in 0..MAX_CASES {
            a.check(i, "c", 1.0, 0.0, || format!("{i}"));
        }
        let mut b = PropertyReport::new("s", "m", 1);
        b.check(99, "c", 2.0, 0.0, || "late".into());
        a.absorb(b);
        assert_eq!(a.failures, MAX_CASES + 1);
        assert_eq!(a.cases.len(), MAX_CASES);
        assert_eq!(a.max_violation, 2.0);
        assert_eq!(a.cases[0].detail, "0");
    }
}
