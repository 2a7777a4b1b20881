//! Check outcomes and residual witnesses.

use serde::{Deserialize, Serialize};

use crate::bundle::Patch;
use crate::scalar::Scalar;

/// Witnesses kept per check; later failures only bump the counter.
const MAX_WITNESSES: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub label: String,
    pub residual: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub witnesses: Vec<Witness>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl Outcome {
    pub fn new(name: impl Into<String>) -> Self {
        Outcome {
            name: name.into(),
            status: Status::Pass,
            witnesses: Vec::new(),
            note: None,
        }
    }

    pub fn error(name: impl Into<String>, msg: impl Into<String>) -> Self {
        Outcome {
            name: name.into(),
            status: Status::Error,
            witnesses: Vec::new(),
            note: Some(msg.into()),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn fail(&mut self, label: impl Into<String>, residual: Vec<String>) {
        if self.status == Status::Pass {
            self.status = Status::Fail;
        }
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(Witness {
                label: label.into(),
                residual,
            });
        }
    }

    /// Records a failure unless every component of `residual` is zero.
    /// Returns whether the residual vanished.
    pub fn expect_zero<F: FnOnce() -> String>(&mut self, patch: &Patch, label: F, residual: &[Scalar]) -> bool {
        if residual.iter().all(Scalar::is_zero) {
            return true;
        }
        self.fail(label(), patch.show_all(residual));
        false
    }

    pub fn expect(&mut self, ok: bool, label: impl FnOnce() -> String, detail: Vec<String>) -> bool {
        if !ok {
            self.fail(label(), detail);
        }
        ok
    }

    /// Merges another outcome's failures into this one.
    pub fn absorb(&mut self, other: &Outcome) {
        if other.status == Status::Error {
            self.status = Status::Error;
        }
        for w in &other.witnesses {
            self.fail(format!("{}: {}", other.name, w.label), w.residual.clone());
        }
        if other.status == Status::Fail && other.witnesses.is_empty() {
            self.fail(other.name.clone(), Vec::new());
        }
    }
}

pub fn all_pass(outcomes: &[Outcome]) -> bool {
    outcomes.iter().all(Outcome::passed)
}

/// Evaluates `residual` on every frame tuple and on the given random tuples,
/// recording failures (in input order) wherever `is_zero` rejects the result.
pub fn verify<F, Z>(
    out: &mut Outcome,
    patch: &Patch,
    frame: &[crate::bundle::Sec],
    arity: usize,
    randoms: &[Vec<crate::bundle::Sec>],
    residual: F,
    is_zero: Z,
) where
    F: Fn(&[&crate::bundle::Sec]) -> crate::bundle::Sec + Sync,
    Z: Fn(&[Scalar]) -> bool + Sync,
{
    use rayon::prelude::*;
    let mut cases: Vec<(String, Vec<&crate::bundle::Sec>)> = Vec::new();
    for idx in tuples(frame.len(), arity) {
        let label = format!(
            "frame ({})",
            idx.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
        );
        cases.push((label, idx.iter().map(|&i| &frame[i]).collect()));
    }
    for (t, tuple) in randoms.iter().enumerate() {
        cases.push((format!("random trial {}", t + 1), tuple.iter().collect()));
    }
    let failures: Vec<(String, crate::bundle::Sec)> = cases
        .par_iter()
        .filter_map(|(label, args)| {
            let r = residual(args);
            if is_zero(&r) {
                None
            } else {
                Some((label.clone(), r))
            }
        })
        .collect();
    for (label, r) in failures {
        out.fail(label, patch.show_all(&r));
    }
}

pub fn tuples(n: usize, arity: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    if n == 0 && arity > 0 {
        return Vec::new();
    }
    out
}

/// Like [`verify`], for cases that carry their own labels.
pub fn verify_labeled<F, Z>(
    out: &mut Outcome,
    patch: &Patch,
    cases: &[(String, Vec<crate::bundle::Sec>)],
    residual: F,
    is_zero: Z,
) where
    F: Fn(&[crate::bundle::Sec]) -> crate::bundle::Sec + Sync,
    Z: Fn(&[Scalar]) -> bool + Sync,
{
    use rayon::prelude::*;
    let failures: Vec<(String, crate::bundle::Sec)> = cases
        .par_iter()
        .filter_map(|(label, args)| {
            let r = residual(args);
            if is_zero(&r) {
                None
            } else {
                Some((label.clone(), r))
            }
        })
        .collect();
    for (label, r) in failures {
        out.fail(label, patch.show_all(&r));
    }
}

/// Renames outcomes to `prefix.name`.
pub fn prefixed(prefix: &str, mut outcomes: Vec<Outcome>) -> Vec<Outcome> {
    for o in &mut outcomes {
        o.name = format!("{prefix}.{}", o.name);
    }
    outcomes
}
