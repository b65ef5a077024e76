//! Run reports: one record per executed check.

use serde::Serialize;
use std::fmt;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Reported value only; never fails a run.
    Measured,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    /// Residual or measured value.
    pub value: f64,
    /// Tolerance for hard checks.
    pub tol: Option<f64>,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub command: String,
    pub checks: Vec<CheckRecord>,
    pub files: Vec<PathBuf>,
    #[serde(skip)]
    clock: Option<Instant>,
}

impl RunReport {
    pub fn new(scenario: &str, command: &str) -> Self {
        Self {
            scenario: scenario.to_string(),
            command: command.to_string(),
            checks: Vec::new(),
            files: Vec::new(),
            clock: Some(Instant::now()),
        }
    }

    fn lap(&mut self) -> f64 {
        let now = Instant::now();
        let dt = self.clock.map_or(0.0, |t| (now - t).as_secs_f64());
        self.clock = Some(now);
        dt
    }

    fn push(&mut self, name: &str, status: Status, value: f64, tol: Option<f64>, detail: String) {
        assert!(
            self.checks.iter().all(|c| c.name != name),
            "check {name} recorded twice"
        );
        let seconds = self.lap();
        self.checks.push(CheckRecord {
            name: name.to_string(),
            status,
            // drop the sign of a negative zero
            value: value + 0.0,
            tol,
            detail,
            seconds,
        });
    }

    /// Hard check `value ≤ tol`; NaN fails.
    pub fn check(&mut self, name: &str, value: f64, tol: f64, detail: impl Into<String>) {
        let status = if value <= tol { Status::Pass } else { Status::Fail };
        self.push(name, status, value, Some(tol), detail.into());
    }

    /// Hard boolean check; `value` is reported alongside.
    pub fn require(&mut self, name: &str, ok: bool, value: f64, detail: impl Into<String>) {
        let status = if ok { Status::Pass } else { Status::Fail };
        self.push(name, status, value, None, detail.into());
    }

    pub fn measure(&mut self, name: &str, value: f64, detail: impl Into<String>) {
        self.push(name, Status::Measured, value, None, detail.into());
    }

    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    pub fn merge(&mut self, other: RunReport) {
        let prefix = other.command.clone();
        for mut c in other.checks {
            c.name = format!("{prefix}.{}", c.name);
            assert!(self.checks.iter().all(|d| d.name != c.name), "check {} recorded twice", c.name);
            self.checks.push(c);
        }
        self.files.extend(other.files);
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario {} / {}", self.scenario, self.command)?;
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Measured => "MEASURED",
            };
            match c.tol {
                Some(t) => writeln!(f, "  {tag:8} {}: {:.3e} (tol {t:.0e}) {}", c.name, c.value, c.detail)?,
                None => writeln!(f, "  {tag:8} {}: {:.3e} {}", c.name, c.value, c.detail)?,
            }
        }
        for p in &self.files {
            writeln!(f, "  wrote {}", p.display())?;
        }
        let (pass, fail, measured) = self.checks.iter().fold((0, 0, 0), |(p, f, m), c| match c.status {
            Status::Pass => (p + 1, f, m),
            Status::Fail => (p, f + 1, m),
            Status::Measured => (p, f, m + 1),
        });
        write!(f, "  {pass} passed, {fail} failed, {measured} measured")
    }
}
