//! Structured pass/fail reports for verification procedures.

use std::fmt;
use std::time::Duration;

/// Outcome of one named stage of a check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageStatus {
    Passed,
    Failed,
    /// Evaluated and logged but outside the claimed regime; never gates.
    Recorded,
}

#[derive(Debug, Clone)]
pub struct Stage {
    pub label: String,
    pub status: StageStatus,
    pub detail: String,
}

impl Stage {
    pub fn passed(label: impl Into<String>, detail: impl Into<String>) -> Self {
        Self { label: label.into(), status: StageStatus::Passed, detail: detail.into() }
    }

    pub fn failed(label: impl Into<String>, detail: impl Into<String>) -> Self {
        Self { label: label.into(), status: StageStatus::Failed, detail: detail.into() }
    }

    pub fn recorded(label: impl Into<String>, detail: impl Into<String>) -> Self {
        Self { label: label.into(), status: StageStatus::Recorded, detail: detail.into() }
    }

    pub fn gate(label: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        if ok {
            Self::passed(label, detail)
        } else {
            Self::failed(label, detail)
        }
    }
}

/// A named check with its stages and wall time.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: String,
    pub stages: Vec<Stage>,
    pub elapsed: Duration,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), stages: Vec::new(), elapsed: Duration::ZERO }
    }

    pub fn push(&mut self, stage: Stage) {
        self.stages.push(stage);
    }

    /// A report passes when no gating stage failed.
    pub fn passed(&self) -> bool {
        self.stages.iter().all(|s| s.status != StageStatus::Failed)
    }

    pub fn first_failure(&self) -> Option<&Stage> {
        self.stages.iter().find(|s| s.status == StageStatus::Failed)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "[{}] {} ({:.1} ms)",
            if self.passed() { "pass" } else { "FAIL" },
            self.name,
            self.elapsed.as_secs_f64() * 1e3
        )?;
        for s in &self.stages {
            let tag = match s.status {
                StageStatus::Passed => "ok",
                StageStatus::Failed => "FAIL",
                StageStatus::Recorded => "info",
            };
            writeln!(f, "    [{tag:4}] {}: {}", s.label, s.detail)?;
        }
        Ok(())
    }
}
