//! Case and failure counts shared by every verification routine.

use serde::Serialize;

/// Outcome of a property check: number of cases and of failures.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    /// Name of the check.
    pub check: String,
    /// Cases examined.
    pub cases: usize,
    /// Cases that failed.
    pub failures: usize,
}

impl CheckReport {
    /// An empty report for the named check.
    pub fn new(check: &str) -> Self {
        CheckReport { check: check.to_string(), cases: 0, failures: 0 }
    }

    /// Counts one case.
    pub fn record(&mut self, ok: bool) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
        }
    }

    /// Adds the counts of another report.
    pub fn absorb(&mut self, o: &CheckReport) {
        self.cases += o.cases;
        self.failures += o.failures;
    }

    /// True when every case passed.
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}
