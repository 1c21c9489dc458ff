//! Uniform verdict reporting for relation checks.

use std::fmt;

/// Outcome of checking one relation instance. A failure always carries the
/// two composite maps that differ, rendered fully, so the discrepancy can be
/// re-derived by hand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails { lhs: String, rhs: String },
    Skipped { reason: String },
}

impl Verdict {
    pub fn is_hold(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fails { .. })
    }

    pub fn is_skip(&self) -> bool {
        matches!(self, Verdict::Skipped { .. })
    }

    pub fn word(&self) -> &'static str {
        match self {
            Verdict::Holds => "hold",
            Verdict::Fails { .. } => "fail",
            Verdict::Skipped { .. } => "skip",
        }
    }
}

/// One checked relation instance: which law, on which chart cycle, and the
/// outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationReport {
    pub relation: String,
    pub cycle: Vec<String>,
    pub verdict: Verdict,
}

impl RelationReport {
    pub fn holds(relation: impl Into<String>, cycle: &[String]) -> Self {
        RelationReport {
            relation: relation.into(),
            cycle: cycle.to_vec(),
            verdict: Verdict::Holds,
        }
    }

    pub fn fails(
        relation: impl Into<String>,
        cycle: &[String],
        lhs: impl Into<String>,
        rhs: impl Into<String>,
    ) -> Self {
        RelationReport {
            relation: relation.into(),
            cycle: cycle.to_vec(),
            verdict: Verdict::Fails {
                lhs: lhs.into(),
                rhs: rhs.into(),
            },
        }
    }

    pub fn skipped(
        relation: impl Into<String>,
        cycle: &[String],
        reason: impl Into<String>,
    ) -> Self {
        RelationReport {
            relation: relation.into(),
            cycle: cycle.to_vec(),
            verdict: Verdict::Skipped {
                reason: reason.into(),
            },
        }
    }

    /// `relation=<label> cycle=<ids> verdict=<hold|fail|skip>`.
    pub fn machine_line(&self) -> String {
        format!(
            "relation={} cycle={} verdict={}",
            self.relation,
            self.cycle.join(","),
            self.verdict.word()
        )
    }
}

impl fmt::Display for RelationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {} cycle={}",
            self.verdict.word(),
            self.relation,
            self.cycle.join(",")
        )?;
        match &self.verdict {
            Verdict::Fails { lhs, rhs } => {
                write!(f, "\n    lhs: {}\n    rhs: {}", lhs, rhs)
            }
            Verdict::Skipped { reason } => write!(f, " ({})", reason),
            Verdict::Holds => Ok(()),
        }
    }
}
