//! Example families: Lie bialgebroids, IM-2-forms, infinitesimal ideal
//! systems and Dirac bialgebras, each with its Dirac bialgebroid, A-Manin
//! pair and adapted Dorfman connection, plus named presets.

mod bialgebra;
mod iis;
mod im2form;
mod lie_bialgebroid;
mod presets;

pub use bialgebra::*;
pub use iis::*;
pub use im2form::*;
pub use lie_bialgebroid::*;
pub use presets::*;

use crate::algebroid::DullAlgebroid;
use crate::bialgebroid::{
    bialgebroid_from_triple, bialgebroids_equivalent, build_courant_c, check_la_dirac, check_manin_pair,
    triple_from_bialgebroid, DiracBialgebroid,
};
use crate::bundle::matrix::{self, Mat};
use crate::bundle::section::{self, Sec};
use crate::bundle::{membership, Frame, Membership, Patch};
use crate::check::{prefixed, verify, Outcome};
use crate::courant::check_courant_axioms;
use crate::dorfman::DorfmanConnection;
use crate::error::{Error, Result};
use crate::sampling::{CheckConfig, Sampler};
use crate::scalar::Scalar;

/// A Dorfman connection written as a formula `(q, b) ↦ Δ_q b`.
pub type DeltaFormula<'a> = dyn Fn(&[Scalar], &[Scalar]) -> Sec + Sync + 'a;

/// Tabulates a formula on the standard frames of `TM ⊕ A*` and `A ⊕ T*M`.
pub fn dorfman_from_formula(patch: &Patch, rank_a: usize, f: &DeltaFormula) -> Result<DorfmanConnection> {
    let m = patch.dim() + rank_a;
    let frame = section::standard_frame(m);
    let table = frame.iter().map(|q| frame.iter().map(|b| f(q, b)).collect()).collect();
    DorfmanConnection::new(patch, rank_a, table)
}

/// The tabulated connection agrees with the formula on random sections.
pub fn check_formula_agrees(delta: &DorfmanConnection, f: &DeltaFormula, cfg: &CheckConfig, name: &str) -> Outcome {
    let m = delta.layout.len();
    let mut s = Sampler::new(cfg, name, delta.patch.dim());
    let randoms: Vec<Vec<Sec>> = (0..cfg.trials).map(|_| vec![s.section(m), s.section(m)]).collect();
    let mut o = Outcome::new(name);
    verify(
        &mut o,
        &delta.patch,
        &[],
        2,
        &randoms,
        |q| section::sub(&delta.eval(q[0], q[1]), &f(q[0], q[1])),
        section::is_zero,
    );
    o
}

/// Vectors `x_m` with `⟨v_l, x_m⟩ = δ_lm`, supported on the certificate
/// coordinates of the (independent) vectors `v`.
pub fn dual_vectors(v: &[Sec], len: usize) -> Result<Vec<Sec>> {
    let frame = Frame::new(v.to_vec(), len)?;
    let rows = frame.certificate_rows();
    let k = v.len();
    // minor_t[l][c] = v_l[rows[c]]
    let minor_t: Mat = v
        .iter()
        .map(|vl| rows.iter().map(|&r| vl[r].clone()).collect())
        .collect();
    if k == 0 {
        return Ok(Vec::new());
    }
    let inv = matrix::inverse(&minor_t)?;
    Ok((0..k)
        .map(|mm| {
            let mut x = section::zero(len);
            for (c, &r) in rows.iter().enumerate() {
                x[r] = inv[c][mm].clone();
            }
            x
        })
        .collect())
}

/// `s` when it lies outside the span of `frame` (as the separating pairing),
/// otherwise empty.
pub(crate) fn outside_witness(frame: &Frame, s: &[Scalar]) -> Sec {
    match membership(s, frame) {
        Membership::Member(_) => Vec::new(),
        Membership::NotMember(w) => vec![section::dot(&w, s)],
    }
}

/// Subbundle frames given by parsed or computed vectors must be independent.
pub(crate) fn frame_of(vectors: Vec<Sec>, len: usize, what: &str) -> Result<Frame> {
    Frame::new(vectors, len).map_err(|e| match e {
        Error::RankDrop(m) => Error::RankDrop(format!("{what}: {m}")),
        other => other,
    })
}

/// `(ρ_A)^t`-style transpose helper: `out_j = Σ_k m[k][j] v_k`.
pub(crate) fn transpose_apply(m: &Mat, v: &[Scalar], cols: usize) -> Sec {
    (0..cols)
        .map(|j| {
            m.iter()
                .zip(v)
                .filter(|(row, vk)| !vk.is_zero() && !row[j].is_zero())
                .map(|(row, vk)| vk * &row[j])
                .sum()
        })
        .collect()
}

/// The generic pipeline on a Dirac bialgebroid: the triple of the recipe,
/// its LA-Dirac conditions, the Courant algebroid `C`, the A-Manin pair and
/// the round trip back to a bialgebroid.
pub fn bialgebroid_pipeline(db: &DiracBialgebroid, cfg: &CheckConfig) -> Vec<Outcome> {
    let mut out = Vec::new();
    let t = match triple_from_bialgebroid(db, None) {
        Ok(t) => t,
        Err(e) => return vec![Outcome::error("pipeline.triple", e.to_string())],
    };
    out.extend(prefixed("pipeline", check_la_dirac(&t, cfg)));
    match build_courant_c(&t) {
        Ok(mp) => {
            out.extend(prefixed("pipeline.C", check_courant_axioms(&mp.c, cfg)));
            out.extend(prefixed("pipeline", check_manin_pair(&mp, cfg)));
        }
        Err(e) => out.push(Outcome::error("pipeline.C", e.to_string())),
    }
    out.push(round_trip(db));
    out
}

/// `bialgebroid → triple → bialgebroid` returns an equivalent bialgebroid.
pub fn round_trip(db: &DiracBialgebroid) -> Outcome {
    let back = triple_from_bialgebroid(db, None).and_then(|t| bialgebroid_from_triple(&t));
    match back {
        Ok(db2) => {
            let mut o = bialgebroids_equivalent(db, &db2);
            o.name = "round_trip".into();
            o
        }
        Err(e) => Outcome::error("round_trip", e.to_string()),
    }
}

/// Anchor matrix `dim × rank` whose columns are the `TM`-parts of `vectors`.
pub(crate) fn anchor_from_tm_parts(vectors: &[Sec], n: usize) -> Mat {
    (0..n)
        .map(|row| vectors.iter().map(|v| v[row].clone()).collect())
        .collect()
}

/// A Lie algebroid on the span of `frame` (vectors in `TM ⊕ A*`, anchor
/// `pr_TM`) whose bracket on frame pairs is `bracket`.
pub(crate) fn algebroid_on_frame(
    name: &str,
    patch: &Patch,
    frame: &Frame,
    bracket: impl Fn(&[Scalar], &[Scalar]) -> Sec,
) -> Result<DullAlgebroid> {
    let v = frame.vectors();
    let k = v.len();
    let mut structure = vec![vec![Vec::new(); k]; k];
    for i in 0..k {
        for j in 0..k {
            let b = bracket(&v[i], &v[j]);
            structure[i][j] = frame.coords(&b).ok_or_else(|| {
                Error::Precondition(format!(
                    "{name}: bracket of frame ({},{}) leaves the subbundle",
                    i + 1,
                    j + 1
                ))
            })?;
        }
    }
    DullAlgebroid::new(name, patch, anchor_from_tm_parts(v, patch.dim()), structure)
}
