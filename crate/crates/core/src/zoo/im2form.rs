//! IM-2-forms `σ: A → T*M`, the morphism `Φ_σ(a,θ) = (ρ(a), σ(a) + θ)` into
//! `TM ⊕ T*M`, and the Dirac bialgebroid `(A, TM, (id, σ^t))`.

use super::{check_formula_agrees, dorfman_from_formula, transpose_apply, DeltaFormula};
use crate::algebroid::{DullAlgebroid, DullBracket, LinearConnection};
use crate::bialgebroid::{
    bialgebroid_from_triple, bialgebroids_equivalent, AManinPair, DiracBialgebroid, LADiracTriple,
};
use crate::bundle::matrix::{self, Mat};
use crate::bundle::section::{self, Sec};
use crate::bundle::{Frame, Patch};
use crate::cartan::{self, TwoForm};
use crate::check::{verify, Outcome};
use crate::courant::{check_courant_morphism, degenerate_courant, standard_courant};
use crate::dorfman::DorfmanConnection;
use crate::error::{Error, Result};
use crate::sampling::{CheckConfig, Sampler};
use crate::scalar::Scalar;

/// A Lie algebroid `A` with a bundle map `σ: A → T*M`, `σ(a) = sigma · a`.
#[derive(Clone, Debug, PartialEq)]
pub struct IMTwoForm {
    pub alg: DullAlgebroid,
    /// `dim × rank`.
    pub sigma: Mat,
}

impl IMTwoForm {
    pub fn new(alg: DullAlgebroid, sigma: Mat) -> Result<Self> {
        let n = alg.dim();
        let r = alg.rank();
        if sigma.len() != n || sigma.iter().any(|row| row.len() != r) {
            return Err(Error::Shape(format!("σ must be {n}×{r}")));
        }
        Ok(IMTwoForm { alg, sigma })
    }

    /// `A = TM` and `σ = ω^♭`, `σ(X) = i_X ω`.
    pub fn from_two_form(patch: &Patch, omega: &TwoForm) -> Result<Self> {
        let n = patch.dim();
        if omega.len() != n || omega.iter().any(|row| row.len() != n) {
            return Err(Error::Shape(format!("2-form must be {n}×{n}")));
        }
        let sigma = (0..n).map(|k| (0..n).map(|i| omega[i][k].clone()).collect()).collect();
        IMTwoForm::new(DullAlgebroid::tangent(patch), sigma)
    }

    pub fn patch(&self) -> &Patch {
        &self.alg.patch
    }

    pub fn sigma_of(&self, a: &[Scalar]) -> Sec {
        matrix::mat_vec(&self.sigma, a)
    }

    /// `σ^t X ∈ Γ(A*)`, `⟨σ^t X, a⟩ = ⟨σ(a), X⟩`.
    pub fn sigma_t(&self, x: &[Scalar]) -> Sec {
        transpose_apply(&self.sigma, x, self.alg.rank())
    }

    pub fn negated(&self) -> IMTwoForm {
        let sigma = self.sigma.iter().map(|row| section::neg(row)).collect();
        IMTwoForm {
            alg: self.alg.clone(),
            sigma,
        }
    }

    /// `graph(s·σ^t) ⊆ TM ⊕ A*` for `s = ±1`.
    pub fn graph_frame(&self, sign: i64) -> Frame {
        let n = self.patch().dim();
        let s = Scalar::from_int(sign);
        let v = (0..n)
            .map(|k| {
                let x = section::basis(n, k);
                section::concat(&x, &section::scale(&s, &self.sigma_t(&x)))
            })
            .collect();
        Frame::new(v, n + self.alg.rank()).expect("graph of a map is a frame")
    }
}

/// `⟨ρ(a₁),σ(a₂)⟩ + ⟨ρ(a₂),σ(a₁)⟩`.
pub fn im_condition1_residual(im: &IMTwoForm, a1: &[Scalar], a2: &[Scalar]) -> Scalar {
    let alg = &im.alg;
    &section::dot(&alg.anchor_of(a1), &im.sigma_of(a2)) + &section::dot(&alg.anchor_of(a2), &im.sigma_of(a1))
}

/// `ℒ_{ρ(a₁)}σ(a₂) − i_{ρ(a₂)}dσ(a₁) − σ[a₁,a₂]`.
pub fn im_condition2_residual(im: &IMTwoForm, a1: &[Scalar], a2: &[Scalar]) -> Sec {
    let alg = &im.alg;
    let mut r = cartan::lie_derivative_1form(&alg.anchor_of(a1), &im.sigma_of(a2));
    section::sub_assign(&mut r, &cartan::contract_d(&alg.anchor_of(a2), &im.sigma_of(a1)));
    section::sub_assign(&mut r, &im.sigma_of(&alg.bracket(a1, a2)));
    r
}

fn label_witnesses(o: &mut Outcome, condition: &str) {
    for w in &mut o.witnesses {
        w.label = format!("IM condition ({condition}), {}", w.label);
    }
}

/// Both IM conditions on frame pairs and seeded random sections.
pub fn check_im2form(im: &IMTwoForm, cfg: &CheckConfig) -> Vec<Outcome> {
    let r = im.alg.rank();
    let frame = section::standard_frame(r);
    let sample = |name: &str| -> Vec<Vec<Sec>> {
        let mut s = Sampler::new(cfg, name, im.patch().dim());
        (0..cfg.trials).map(|_| vec![s.section(r), s.section(r)]).collect()
    };
    let mut c1 = Outcome::new("im2form.condition1");
    verify(
        &mut c1,
        im.patch(),
        &frame,
        2,
        &sample("im2form.condition1"),
        |q| vec![im_condition1_residual(im, q[0], q[1])],
        section::is_zero,
    );
    label_witnesses(&mut c1, "1");
    let mut c2 = Outcome::new("im2form.condition2");
    verify(
        &mut c2,
        im.patch(),
        &frame,
        2,
        &sample("im2form.condition2"),
        |q| im_condition2_residual(im, q[0], q[1]),
        section::is_zero,
    );
    label_witnesses(&mut c2, "2");
    vec![
        c1.with_note("⟨ρ(a₁),σ(a₂)⟩ = −⟨ρ(a₂),σ(a₁)⟩"),
        c2.with_note("σ[a₁,a₂] = ℒ_{ρ(a₁)}σ(a₂) − i_{ρ(a₂)}dσ(a₁)"),
    ]
}

/// `Φ_σ(a,θ) = (ρ(a), σ(a) + θ)` as a `2n × (r+n)` matrix.
pub fn im2form_phi(im: &IMTwoForm) -> Mat {
    let n = im.patch().dim();
    let r = im.alg.rank();
    let cols: Vec<Sec> = (0..r + n)
        .map(|c| {
            if c < r {
                section::concat(&im.alg.anchor_col(c), &im.sigma_of(&section::basis(r, c)))
            } else {
                section::basis(2 * n, c - r + n)
            }
        })
        .collect();
    (0..2 * n)
        .map(|row| cols.iter().map(|v| v[row].clone()).collect())
        .collect()
}

/// `Φ_σ` against the degenerate Courant algebroid of `A` and `TM ⊕ T*M`.
pub fn check_im2form_morphism(im: &IMTwoForm, cfg: &CheckConfig) -> Result<Vec<Outcome>> {
    check_courant_morphism(
        &im2form_phi(im),
        &degenerate_courant(&im.alg),
        &standard_courant(im.patch()),
        cfg,
    )
}

/// `(A, TM, ι = (id, σ^t))` with the A-Manin pair `(TM ⊕ T*M, TM ⊕ 0)`.
pub fn bialgebroid_from_im2form(im: &IMTwoForm) -> Result<(DiracBialgebroid, AManinPair)> {
    let n = im.patch().dim();
    let iota = im.graph_frame(1).vectors().to_vec();
    let tm = DullAlgebroid::tangent(im.patch());
    let db = DiracBialgebroid::new(im.alg.clone(), tm.clone(), iota.clone())?;
    let u_in_c = (0..n).map(|k| section::basis(2 * n, k)).collect();
    let mp = AManinPair {
        alg: im.alg.clone(),
        c: standard_courant(im.patch()),
        u_in_c,
        iota,
        phi: im2form_phi(im),
        u_bracket: Some(tm.structure),
    };
    Ok((db, mp))
}

/// `Δ_{(X,α)}(a,θ) = (∇_X a, ℒ_X(θ − σ(a)) + ⟨∇^*_·(σ^tX + α), a⟩ + σ(∇_X a))`.
pub fn adapted_presymplectic_eval(im: &IMTwoForm, conn: &LinearConnection, q: &[Scalar], b: &[Scalar]) -> Sec {
    let n = im.patch().dim();
    let r = im.alg.rank();
    let (x, alpha) = q.split_at(n);
    let (a, theta) = b.split_at(r);
    let nx = conn.covariant(x, a);
    let beta = section::add(&im.sigma_t(x), alpha);
    let mut form = cartan::lie_derivative_1form(x, &section::sub(theta, &im.sigma_of(a)));
    for (k, f) in form.iter_mut().enumerate() {
        let g = section::dot(&conn.dual_covariant(&section::basis(n, k), &beta), a);
        *f = &*f + &g;
    }
    section::add_assign(&mut form, &im.sigma_of(&nx));
    section::concat(&nx, &form)
}

pub fn adapted_dorfman_presymplectic(
    im: &IMTwoForm,
    conn: &LinearConnection,
    cfg: &CheckConfig,
) -> Result<(DorfmanConnection, Outcome)> {
    let f: &DeltaFormula = &|q, b| adapted_presymplectic_eval(im, conn, q, b);
    let delta = dorfman_from_formula(im.patch(), im.alg.rank(), f)?;
    let o = check_formula_agrees(&delta, f, cfg, "presymplectic.adapted_formula");
    Ok((delta, o))
}

/// `(A, U = graph(−σ^t), Δ)`; its core is `K = graph(σ)`.
pub fn presymplectic_triple(im: &IMTwoForm, delta: DorfmanConnection) -> Result<LADiracTriple> {
    LADiracTriple::new(im.alg.clone(), im.graph_frame(-1), delta)
}

/// `⟦(X₁,−σ^tX₁),(X₂,−σ^tX₂)⟧_Δ = ([X₁,X₂], −σ^t[X₁,X₂])`.
pub fn check_presymplectic_restriction(im: &IMTwoForm, delta: &DorfmanConnection, cfg: &CheckConfig) -> Outcome {
    let n = im.patch().dim();
    let graph = |x: &[Scalar]| section::concat(x, &section::neg(&im.sigma_t(x)));
    let mut s = Sampler::new(cfg, "presymplectic.u_restriction", n);
    let randoms: Vec<Vec<Sec>> = (0..cfg.trials).map(|_| vec![s.section(n), s.section(n)]).collect();
    let mut o = Outcome::new("presymplectic.u_restriction");
    verify(
        &mut o,
        im.patch(),
        &section::standard_frame(n),
        2,
        &randoms,
        |q| {
            let lhs = delta.dull_bracket(&graph(q[0]), &graph(q[1]));
            section::sub(&lhs, &graph(&cartan::lie_bracket_vf(q[0], q[1])))
        },
        section::is_zero,
    );
    o
}

/// The bialgebroid read off the adapted triple has `ι = (id, −σ^t)`; it is
/// compared with `(A, TM, (id, σ^t))` after replacing `σ` by `−σ`. The
/// note records both frames and the unreconciled verdict.
pub fn check_sign_reconciliation(im: &IMTwoForm, delta: DorfmanConnection) -> Outcome {
    let mut o = Outcome::new("presymplectic.sign_reconciled");
    let from_triple = match presymplectic_triple(im, delta).and_then(|t| bialgebroid_from_triple(&t)) {
        Ok(db) => db,
        Err(e) => return Outcome::error("presymplectic.sign_reconciled", e.to_string()),
    };
    let (stated, reconciled) = match (bialgebroid_from_im2form(im), bialgebroid_from_im2form(&im.negated())) {
        (Ok(a), Ok(b)) => (a.0, b.0),
        (Err(e), _) | (_, Err(e)) => return Outcome::error("presymplectic.sign_reconciled", e.to_string()),
    };
    o.absorb(&bialgebroids_equivalent(&reconciled, &from_triple));
    let direct = bialgebroids_equivalent(&stated, &from_triple).passed();
    let show = |v: &[Sec]| {
        v.iter()
            .map(|s| format!("({})", im.patch().show_all(s).join(", ")))
            .collect::<Vec<_>>()
            .join(" ")
    };
    o.with_note(format!(
        "ι = (id, σ^t) frame {}; triple U = graph(−σ^t) frame {}; equivalent without the sign change: {}",
        show(&stated.iota),
        show(&from_triple.iota),
        direct
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::all_pass;

    fn omega(p: &Patch, f: &str) -> TwoForm {
        let n = p.dim();
        let mut w = vec![vec![Scalar::zero(); n]; n];
        let f = p.parse(f).unwrap();
        w[0][1] = f.clone();
        w[1][0] = -&f;
        w
    }

    #[test]
    fn closed_form_is_im_and_morphism() {
        let p = Patch::standard(2);
        let im = IMTwoForm::from_two_form(&p, &omega(&p, "1")).unwrap();
        let cfg = CheckConfig::default();
        assert!(all_pass(&check_im2form(&im, &cfg)));
        assert!(all_pass(&check_im2form_morphism(&im, &cfg).unwrap()));
        let conn = LinearConnection::trivial(2, 2);
        let (delta, agree) = adapted_dorfman_presymplectic(&im, &conn, &cfg).unwrap();
        assert!(agree.passed(), "{agree:#?}");
        assert!(check_presymplectic_restriction(&im, &delta, &cfg).passed());
        let t = presymplectic_triple(&im, delta.clone()).unwrap();
        let la = crate::bialgebroid::check_la_dirac(&t, &cfg);
        assert!(all_pass(&la), "{la:#?}");
        let rec = check_sign_reconciliation(&im, delta);
        assert!(rec.passed(), "{rec:#?}");
    }

    #[test]
    fn nonclosed_form_fails_condition2_and_bracket() {
        let p = Patch::standard(3);
        let im = IMTwoForm::from_two_form(&p, &omega(&p, "z")).unwrap();
        let cfg = CheckConfig::default();
        let outs = check_im2form(&im, &cfg);
        assert!(outs[0].passed());
        assert!(!outs[1].passed());
        assert!(outs[1].witnesses[0].label.starts_with("IM condition (2)"));
        let m = check_im2form_morphism(&im, &cfg).unwrap();
        assert!(m[0].passed() && m[1].passed());
        assert!(!m[2].passed());
    }

    #[test]
    fn zero_sigma_phi() {
        let p = Patch::standard(2);
        let im = IMTwoForm::from_two_form(&p, &omega(&p, "0")).unwrap();
        // Φ(a,θ) = (ρ(a), θ)
        let phi = im2form_phi(&im);
        for (i, row) in phi.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let expect = (i < 2 && j == i) || (i >= 2 && j == i);
                assert_eq!(v.is_one(), expect);
            }
        }
    }
}
