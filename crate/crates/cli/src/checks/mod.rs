//! The check registry. Every check draws randomness only from streams keyed
//! by the run seed and its own id, so checks can run in any order.

use std::collections::BTreeMap;

use hoplab_core::ops::Window;
use hoplab_core::rng::{stream, LabRng};
use serde::Serialize;
use serde_json::Value;

use crate::config::{RunConfig, Suite};
use crate::report::Verdict;

mod averaging;
mod fibers;
mod group;
mod hulls;
mod ops;
mod reps;
mod spectral;

pub struct Ctx<'a> {
    pub config: &'a RunConfig,
    pub id: &'static str,
}

impl Ctx<'_> {
    pub fn rng(&self, label: &str) -> LabRng {
        stream(self.config.seed, &format!("{}/{label}", self.id))
    }

    pub fn window(&self) -> Window {
        self.config.window
    }

    /// The configured window clipped to `[-w, w] x [0, u] x [0, v]`.
    pub fn clipped(&self, w: i64, u: i64, v: i64) -> Window {
        let c = self.config.window;
        Window::new(
            c.w_min.max(-w),
            c.w_max.min(w),
            c.u_max.min(u),
            c.v_max.min(v),
        )
        .expect("clipping keeps a valid window")
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub verdict: Verdict,
    pub deviation: Option<f64>,
    pub tolerance: Option<f64>,
    pub params: BTreeMap<String, Value>,
    pub witness: Option<Value>,
    pub detail: String,
}

impl Outcome {
    fn with(verdict: Verdict) -> Self {
        Self {
            verdict,
            deviation: None,
            tolerance: None,
            params: BTreeMap::new(),
            witness: None,
            detail: String::new(),
        }
    }

    /// Passes iff `deviation <= tolerance`.
    pub fn bound(deviation: f64, tolerance: f64) -> Self {
        let mut o = Self::with(if deviation <= tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        });
        o.deviation = Some(deviation);
        o.tolerance = Some(tolerance);
        o
    }

    pub fn flag(ok: bool) -> Self {
        Self::with(if ok { Verdict::Pass } else { Verdict::Fail })
    }

    pub fn skipped(reason: impl Into<String>) -> Self {
        let mut o = Self::with(Verdict::Skipped);
        o.detail = reason.into();
        o
    }

    /// Also requires `ok`; a false `ok` turns a pass into a failure.
    pub fn and(mut self, ok: bool, what: &str) -> Self {
        if !ok && self.verdict == Verdict::Pass {
            self.verdict = Verdict::Fail;
            self.note(format!("failed: {what}"));
        }
        self
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(
            key.to_string(),
            serde_json::to_value(value).expect("parameters serialize"),
        );
        self
    }

    pub fn witness(mut self, value: impl Serialize) -> Self {
        self.witness = Some(serde_json::to_value(value).expect("witnesses serialize"));
        self
    }

    pub fn detail(mut self, text: impl Into<String>) -> Self {
        self.note(text.into());
        self
    }

    fn note(&mut self, text: String) {
        if self.detail.is_empty() {
            self.detail = text;
        } else {
            self.detail = format!("{}; {text}", self.detail);
        }
    }
}

pub type CheckFn = fn(&Ctx) -> anyhow::Result<Outcome>;

pub struct CheckDef {
    pub id: &'static str,
    pub suite: Suite,
    pub anchor: &'static str,
    /// Heuristic checks report evidence and never fail a run.
    pub heuristic: bool,
    /// Minimum `(u_max, v_max)` of the configured window.
    pub needs: (i64, i64),
    pub run: CheckFn,
}

impl CheckDef {
    pub const fn new(id: &'static str, suite: Suite, anchor: &'static str, run: CheckFn) -> Self {
        Self {
            id,
            suite,
            anchor,
            heuristic: false,
            needs: (0, 0),
            run,
        }
    }

    pub const fn heuristic(mut self) -> Self {
        self.heuristic = true;
        self
    }

    pub const fn needs(mut self, u: i64, v: i64) -> Self {
        self.needs = (u, v);
        self
    }
}

/// All checks ordered by suite, then id.
pub fn registry() -> Vec<CheckDef> {
    let mut all = Vec::new();
    all.extend(group::checks());
    all.extend(ops::checks());
    all.extend(averaging::checks());
    all.extend(hulls::checks());
    all.extend(spectral::checks());
    all.extend(fibers::checks());
    all.extend(reps::checks());
    all.sort_by(|a, b| (a.suite, a.id).cmp(&(b.suite, b.id)));
    all
}

/// Largest entry of a list of values; 0 for an empty list.
pub(crate) fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}
