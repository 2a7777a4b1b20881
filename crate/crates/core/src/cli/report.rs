//! Machine-readable check reports.

use std::time::Instant;

use serde::Serialize;

use crate::check::{Outcome, Status, Witness};
use crate::sampling::CheckConfig;

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub seed: u64,
    pub trials: usize,
    pub degree: u32,
    /// Wall time of the group of checks this one was computed in.
    pub timing_ms: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub suite: String,
    pub instance: String,
    pub seed: u64,
    pub trials: usize,
    pub max_degree: u32,
    pub status: Status,
    pub checks: Vec<CheckRecord>,
}

/// Collects outcomes group by group, timing each group.
pub struct Collector {
    cfg: CheckConfig,
    records: Vec<CheckRecord>,
}

impl Collector {
    pub fn new(cfg: &CheckConfig) -> Self {
        Collector {
            cfg: *cfg,
            records: Vec::new(),
        }
    }

    pub fn group(&mut self, f: impl FnOnce() -> Vec<Outcome>) {
        let start = Instant::now();
        let outcomes = f();
        let ms = start.elapsed().as_millis() as u64;
        for o in outcomes {
            if self.records.iter().any(|r| r.name == o.name) {
                continue;
            }
            self.records.push(CheckRecord {
                name: o.name,
                status: o.status,
                witnesses: o.witnesses,
                note: o.note,
                seed: self.cfg.seed,
                trials: self.cfg.trials,
                degree: self.cfg.max_degree,
                timing_ms: ms,
            });
        }
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn finish(mut self, suite: &str, instance: &str) -> Report {
        self.records.sort_by(|a, b| a.name.cmp(&b.name));
        let status = if self.records.iter().any(|r| r.status == Status::Error) {
            Status::Error
        } else if self.records.iter().any(|r| r.status == Status::Fail) {
            Status::Fail
        } else {
            Status::Pass
        };
        Report {
            schema: 1,
            suite: suite.to_string(),
            instance: instance.to_string(),
            seed: self.cfg.seed,
            trials: self.cfg.trials,
            max_degree: self.cfg.max_degree,
            status,
            checks: self.records,
        }
    }
}

impl Report {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// The same report with every timing zeroed.
    pub fn without_timing(&self) -> Report {
        let mut r = self.clone();
        for c in &mut r.checks {
            c.timing_ms = 0;
        }
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Error => "ERROR",
            };
            out.push_str(&format!("{tag:5} {}\n", c.name));
            for w in &c.witnesses {
                out.push_str(&format!("      {}\n", w.label));
                for r in &w.residual {
                    out.push_str(&format!("        residual: {r}\n"));
                }
            }
            if let Some(n) = &c.note {
                if c.status != Status::Pass {
                    out.push_str(&format!("      note: {n}\n"));
                }
            }
        }
        let passed = self.checks.iter().filter(|c| c.status == Status::Pass).count();
        out.push_str(&format!(
            "{}: {passed}/{} checks passed ({} on {}, seed {}, trials {}, max degree {})\n",
            match self.status {
                Status::Pass => "pass",
                Status::Fail => "fail",
                Status::Error => "error",
            },
            self.checks.len(),
            self.suite,
            self.instance,
            self.seed,
            self.trials,
            self.max_degree
        ));
        out
    }
}
