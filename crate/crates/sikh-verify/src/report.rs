//! Check reports, serialized as JSON for CI consumption.

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub description: String,
    /// A minimized counterexample diagram in `.skd` form, when one exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub trials: u64,
    pub failures: Vec<Failure>,
    pub elapsed_ms: u128,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{}: {} ({} trials, {} failures, {} ms)",
            self.check,
            if self.passed() { "ok" } else { "FAILED" },
            self.trials,
            self.failures.len(),
            self.elapsed_ms
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

/// Time a closure producing `(trials, failures)` into a report.
pub fn run_check<F>(name: &str, body: F) -> VerificationReport
where
    F: FnOnce() -> (u64, Vec<Failure>),
{
    let start = std::time::Instant::now();
    let (trials, failures) = body();
    VerificationReport {
        check: name.to_string(),
        trials,
        failures,
        elapsed_ms: start.elapsed().as_millis(),
    }
}
