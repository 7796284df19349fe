//! Executes the selected checks in a worker pool and assembles the report.

use std::time::Instant;

use rayon::prelude::*;

use crate::checks::{registry, CheckDef, Ctx, Outcome};
use crate::config::RunConfig;
use crate::report::{CheckRecord, Report, Verdict};

fn execute(def: &CheckDef, config: &RunConfig) -> CheckRecord {
    let start = Instant::now();
    let win = config.window;
    let outcome = if win.u_max < def.needs.0 || win.v_max < def.needs.1 {
        Outcome::skipped(format!(
            "window: needs u_max >= {} and v_max >= {}",
            def.needs.0, def.needs.1
        ))
    } else {
        let ctx = Ctx { config, id: def.id };
        match (def.run)(&ctx) {
            Ok(o) => o,
            Err(e) => Outcome::flag(false).detail(format!("error: {e:#}")),
        }
    };
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let verdict = match (def.heuristic, outcome.verdict) {
        (true, Verdict::Pass) => Verdict::HeuristicPass,
        (true, Verdict::Fail) => Verdict::HeuristicFail,
        (_, v) => v,
    };
    let mut witness = outcome.witness;
    if verdict == Verdict::Fail {
        // the check id and seed determine every random draw, so these
        // suffice to replay it
        witness = Some(serde_json::json!({
            "replay": { "check": def.id, "seed": config.seed },
            "data": witness,
        }));
    }
    CheckRecord {
        id: def.id.to_string(),
        suite: def.suite,
        anchor: def.anchor.to_string(),
        verdict,
        deviation: outcome.deviation,
        tolerance: outcome.tolerance,
        params: outcome.params,
        witness,
        detail: outcome.detail,
        wall_ms: config.timings.then_some(elapsed),
    }
}

/// Runs every registered check in the configured suites.
pub fn run(config: &RunConfig) -> Report {
    let defs: Vec<CheckDef> = registry()
        .into_iter()
        .filter(|d| config.suites.contains(&d.suite))
        .collect();
    let records: Vec<CheckRecord> = defs.par_iter().map(|d| execute(d, config)).collect();
    Report::new(config.clone(), records)
}

/// Runs one check by id, ignoring the suite selection.
pub fn run_single(config: &RunConfig, id: &str) -> Option<CheckRecord> {
    registry()
        .iter()
        .find(|d| d.id == id)
        .map(|d| execute(d, config))
}

pub fn check_ids() -> Vec<&'static str> {
    registry().iter().map(|d| d.id).collect()
}
