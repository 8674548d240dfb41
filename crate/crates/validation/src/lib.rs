//! Pass/fail bookkeeping for the acceptance run.

use std::time::Instant;

/// Result of one acceptance check.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    pub fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

/// Collects one line per check and the final tally.
#[derive(Debug, Default)]
pub struct Report {
    lines: Vec<(String, Outcome)>,
    filter: Option<String>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    /// Only checks whose name contains `pattern` are run.
    pub fn with_filter(pattern: Option<String>) -> Self {
        Self {
            lines: Vec::new(),
            filter: pattern,
        }
    }

    /// Runs `check`, prints its line immediately and records the outcome.
    /// An `Err` counts as a failure.
    pub fn run<E: std::fmt::Display>(&mut self, name: &str, check: impl FnOnce() -> Result<Outcome, E>) {
        if self.filter.as_ref().is_some_and(|f| !name.contains(f.as_str())) {
            return;
        }
        let start = Instant::now();
        let outcome = check().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        let line = format_line(name, &outcome, start.elapsed().as_secs_f64());
        println!("{line}");
        self.lines.push((name.to_string(), outcome));
    }

    pub fn passed(&self) -> usize {
        self.lines.iter().filter(|(_, o)| o.passed).count()
    }

    pub fn total(&self) -> usize {
        self.lines.len()
    }

    pub fn all_passed(&self) -> bool {
        self.passed() == self.total()
    }

    pub fn failed(&self) -> Vec<&str> {
        self.lines
            .iter()
            .filter(|(_, o)| !o.passed)
            .map(|(n, _)| n.as_str())
            .collect()
    }
}

pub fn format_line(name: &str, outcome: &Outcome, seconds: f64) -> String {
    let tag = if outcome.passed { "PASS" } else { "FAIL" };
    format!("{tag}  {name:<24} {} [{seconds:.1} s]", outcome.detail)
}
