use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{RunConfig, Suite};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
    HeuristicPass,
    HeuristicFail,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skipped => "SKIPPED",
            Verdict::HeuristicPass => "HEURISTIC-PASS",
            Verdict::HeuristicFail => "HEURISTIC-FAIL",
        }
    }

    /// Whether this verdict causes a nonzero exit status.
    pub fn is_failure(self) -> bool {
        self == Verdict::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub suite: Suite,
    /// What the check verifies, in words.
    pub anchor: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tolerance: Option<f64>,
    pub params: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Value>,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_ms: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
    pub heuristic_pass: usize,
    pub heuristic_fail: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub config: RunConfig,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
    pub success: bool,
}

impl Report {
    pub fn new(config: RunConfig, checks: Vec<CheckRecord>) -> Self {
        let mut summary = Summary::default();
        for c in &checks {
            match c.verdict {
                Verdict::Pass => summary.pass += 1,
                Verdict::Fail => summary.fail += 1,
                Verdict::Skipped => summary.skipped += 1,
                Verdict::HeuristicPass => summary.heuristic_pass += 1,
                Verdict::HeuristicFail => summary.heuristic_fail += 1,
            }
        }
        let success = summary.fail == 0;
        Self {
            schema: SCHEMA,
            config,
            checks,
            summary,
            success,
        }
    }

    pub fn check(&self, id: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> anyhow::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["id", "suite", "verdict", "deviation", "tolerance", "detail"])?;
        for c in &self.checks {
            w.write_record([
                c.id.as_str(),
                c.suite.name(),
                c.verdict.label(),
                &c.deviation.map(|d| format!("{d:e}")).unwrap_or_default(),
                &c.tolerance.map(|d| format!("{d:e}")).unwrap_or_default(),
                c.detail.as_str(),
            ])?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = write!(out, "{:<15} {:<34}", c.verdict.label(), c.id);
            if let Some(d) = c.deviation {
                let _ = write!(out, " dev={d:.3e}");
            }
            if let Some(t) = c.tolerance {
                let _ = write!(out, " tol={t:.1e}");
            }
            if let Some(ms) = c.wall_ms {
                let _ = write!(out, " {ms:.0}ms");
            }
            if !c.detail.is_empty() {
                let _ = write!(out, "  {}", c.detail);
            }
            out.push('\n');
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "{} pass, {} fail, {} skipped, {} heuristic pass, {} heuristic fail",
            s.pass, s.fail, s.skipped, s.heuristic_pass, s.heuristic_fail
        );
        out
    }
}
