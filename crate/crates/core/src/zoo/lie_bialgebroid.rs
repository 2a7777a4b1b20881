//! Lie bialgebroids `(A, A*)`, their Courant double and the Dirac
//! bialgebroid `(A, A*, (ρ_⋆, id))`.

use std::sync::Arc;

use super::{algebroid_on_frame, check_formula_agrees, dorfman_from_formula, DeltaFormula};
use crate::algebroid::{lie_checks, DullAlgebroid, DullBracket, LinearConnection};
use crate::bialgebroid::{AManinPair, DiracBialgebroid, LADiracTriple};
use crate::bundle::matrix::Mat;
use crate::bundle::section::{self, Sec};
use crate::bundle::{Frame, Patch};
use crate::cartan::{self, TwoForm};
use crate::check::{prefixed, verify, verify_labeled, Outcome};
use crate::courant::{check_courant_axioms, Bracket, Carrier, CourantPresentation};
use crate::dorfman::DorfmanConnection;
use crate::error::{Error, Result};
use crate::sampling::{CheckConfig, Sampler};
use crate::scalar::Scalar;

/// A Lie algebroid `A` and a Lie algebroid structure on `A*`, written in the
/// frame dual to the frame of `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieBialgebroidData {
    pub alg_a: DullAlgebroid,
    pub alg_astar: DullAlgebroid,
}

impl LieBialgebroidData {
    pub fn new(alg_a: DullAlgebroid, alg_astar: DullAlgebroid) -> Result<Self> {
        if alg_a.patch != alg_astar.patch {
            return Err(Error::PatchMismatch("A and A* live on different patches".into()));
        }
        if alg_a.rank() != alg_astar.rank() {
            return Err(Error::Shape(format!(
                "A has rank {} but A* has rank {}",
                alg_a.rank(),
                alg_astar.rank()
            )));
        }
        Ok(LieBialgebroidData { alg_a, alg_astar })
    }

    /// `A*` with zero anchor and bracket.
    pub fn trivial_dual(alg_a: DullAlgebroid) -> Self {
        let astar = DullAlgebroid::abelian(&alg_a.patch, alg_a.rank());
        LieBialgebroidData {
            alg_a,
            alg_astar: astar,
        }
    }

    /// `(TM, T*M_π)` with the Koszul bracket of `π`.
    pub fn poisson(patch: &Patch, pi: &TwoForm) -> Result<Self> {
        Ok(LieBialgebroidData {
            alg_a: DullAlgebroid::tangent(patch),
            alg_astar: koszul_algebroid(patch, pi)?,
        })
    }

    pub fn patch(&self) -> &Patch {
        &self.alg_a.patch
    }

    pub fn rank(&self) -> usize {
        self.alg_a.rank()
    }

    /// `ρ_⋆^t θ ∈ Γ(A)`.
    pub fn rho_star_t(&self, theta: &[Scalar]) -> Sec {
        self.alg_astar.rho_t(theta)
    }

    /// The frame `(ρ_⋆ e^i, e^i)` of `graph(ρ_⋆) ⊆ TM ⊕ A*`.
    pub fn graph_frame(&self) -> Frame {
        let r = self.rank();
        let v = (0..r)
            .map(|i| section::concat(&self.alg_astar.anchor_col(i), &section::basis(r, i)))
            .collect();
        Frame::new(v, self.patch().dim() + r).expect("graph of a map is a frame")
    }
}

/// `T*M` with anchor `π^♯` (`π^♯ dx^j = Σ_k π^{jk} ∂_k`) and the Koszul
/// bracket `[θ₁,θ₂] = ℒ_{π^♯θ₁}θ₂ − ℒ_{π^♯θ₂}θ₁ − dπ(θ₁,θ₂)`, so that
/// `[dx^i, dx^j] = dπ^{ij}`.
pub fn koszul_algebroid(patch: &Patch, pi: &TwoForm) -> Result<DullAlgebroid> {
    let n = patch.dim();
    if pi.len() != n || pi.iter().any(|r| r.len() != n) {
        return Err(Error::Shape(format!("bivector must be {n}×{n}")));
    }
    for i in 0..n {
        for j in i..n {
            if pi[i][j] != -&pi[j][i] {
                return Err(Error::Precondition(format!(
                    "bivector is not skew at ({},{})",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    let anchor: Mat = (0..n).map(|k| (0..n).map(|j| pi[j][k].clone()).collect()).collect();
    let structure = (0..n)
        .map(|i| (0..n).map(|j| cartan::d_function(&pi[i][j], n)).collect())
        .collect();
    DullAlgebroid::new("T*M_pi", patch, anchor, structure)
}

/// `⟦(a,α),(b,β)⟧ = ([a,b] + ℒ_α b − i_β d_* a, [α,β]_* + ℒ_a β − i_b d α)`.
pub fn double_bracket(lb: &LieBialgebroidData, c1: &[Scalar], c2: &[Scalar]) -> Sec {
    let r = lb.rank();
    let (a, alpha) = c1.split_at(r);
    let (b, beta) = c2.split_at(r);
    let ga = &lb.alg_a;
    let gs = &lb.alg_astar;
    let mut x = ga.bracket(a, b);
    section::add_assign(&mut x, &gs.lie_derivative_dual(alpha, b));
    section::sub_assign(&mut x, &gs.contract_d(beta, a));
    let mut xi = gs.bracket(alpha, beta);
    section::add_assign(&mut xi, &ga.lie_derivative_dual(a, beta));
    section::sub_assign(&mut xi, &ga.contract_d(b, alpha));
    section::concat(&x, &xi)
}

/// The Courant algebroid `A ⊕ A*` with anchor `ρ ⊕ ρ_⋆`, pairing
/// `α(b) + β(a)`, `𝒟f = (d_* f, d f)` and the double bracket.
pub fn courant_double(lb: &LieBialgebroidData) -> CourantPresentation {
    let n = lb.patch().dim();
    let r = lb.rank();
    let l = 2 * r;
    let anchor: Mat = (0..n)
        .map(|k| section::concat(&lb.alg_a.anchor[k], &lb.alg_astar.anchor[k]))
        .collect();
    let pairing: Mat = (0..l)
        .map(|i| section::basis(l, if i < r { i + r } else { i - r }))
        .collect();
    let d_map = (0..n)
        .map(|k| section::concat(&lb.alg_astar.anchor[k], &lb.alg_a.anchor[k]))
        .collect();
    let data = lb.clone();
    let c = CourantPresentation {
        name: "A+A*".into(),
        patch: lb.patch().clone(),
        carrier: Carrier::Trivial(l),
        anchor,
        pairing,
        d_map,
        bracket: Bracket::Formula(Arc::new(move |c1: &[Scalar], c2: &[Scalar]| {
            double_bracket(&data, c1, c2)
        })),
        degenerate: false,
    };
    c.validate().expect("the double is well formed");
    c
}

/// Lie algebroid checks of both factors and the Courant axioms of the double.
pub fn check_lie_bialgebroid(lb: &LieBialgebroidData, cfg: &CheckConfig) -> Vec<Outcome> {
    let mut out = lie_checks(&lb.alg_a, cfg, "lie_bialgebroid.A");
    out.extend(lie_checks(&lb.alg_astar, cfg, "lie_bialgebroid.A*"));
    out.extend(prefixed(
        "lie_bialgebroid.double",
        check_courant_axioms(&courant_double(lb), cfg),
    ));
    out
}

/// `ρ∘ρ_⋆^t + ρ_⋆∘ρ^t = 0` on the coframe `dx^k`.
pub fn check_anchor_anomaly(lb: &LieBialgebroidData) -> Outcome {
    let n = lb.patch().dim();
    let mut o = Outcome::new("lie_bialgebroid.anchor_anomaly");
    for k in 0..n {
        let dx = section::basis(n, k);
        let r = section::add(
            &lb.alg_a.anchor_of(&lb.rho_star_t(&dx)),
            &lb.alg_astar.anchor_of(&lb.alg_a.rho_t(&dx)),
        );
        o.expect_zero(lb.patch(), || format!("dx^{}", k + 1), &r);
    }
    o
}

/// `Φ(a,θ) = (a + ρ_⋆^tθ, ρ^tθ)` as a `2r × (r+n)` matrix.
pub fn poisson_phi(lb: &LieBialgebroidData) -> Mat {
    let n = lb.patch().dim();
    let r = lb.rank();
    let cols: Vec<Sec> = (0..r + n)
        .map(|c| {
            if c < r {
                section::basis(2 * r, c)
            } else {
                let dx = section::basis(n, c - r);
                section::concat(&lb.rho_star_t(&dx), &lb.alg_a.rho_t(&dx))
            }
        })
        .collect();
    (0..2 * r)
        .map(|row| cols.iter().map(|v| v[row].clone()).collect())
        .collect()
}

/// `(A, A*, ι = (ρ_⋆, id))` with the A-Manin pair `(A ⊕ A*, A*)`.
///
/// The anchor anomaly must vanish; the full compatibility is the caller's
/// [`check_lie_bialgebroid`].
pub fn bialgebroid_from_lie_bialgebroid(lb: &LieBialgebroidData) -> Result<(DiracBialgebroid, AManinPair)> {
    let anomaly = check_anchor_anomaly(lb);
    if !anomaly.passed() {
        return Err(Error::Precondition(
            "ρ∘ρ_⋆^t ≠ −ρ_⋆∘ρ^t, so (A, A*) is not a Lie bialgebroid".into(),
        ));
    }
    let r = lb.rank();
    let iota: Vec<Sec> = lb.graph_frame().vectors().to_vec();
    let db = DiracBialgebroid::new(lb.alg_a.clone(), lb.alg_astar.clone(), iota.clone())?;
    let u_in_c = (0..r).map(|i| section::basis(2 * r, r + i)).collect();
    let mp = AManinPair {
        alg: lb.alg_a.clone(),
        c: courant_double(lb),
        u_in_c,
        iota,
        phi: poisson_phi(lb),
        u_bracket: Some(lb.alg_astar.structure.clone()),
    };
    Ok((db, mp))
}

/// `Δ_{(X,α)}(a,θ) = (⟨a, ∇^{*bas}_· α⟩ + ∇_X a − ρ_⋆^t⟨∇^*_· α, a⟩,
///  ℒ_X θ + ⟨∇^*_· α, a⟩)` with `∇^{*bas}_{β}α = ∇^*_{ρ_⋆α}β + [β,α]_*`.
pub fn adapted_poisson_eval(lb: &LieBialgebroidData, conn: &LinearConnection, q: &[Scalar], b: &[Scalar]) -> Sec {
    let n = lb.patch().dim();
    let r = lb.rank();
    let (x, alpha) = q.split_at(n);
    let (a, theta) = b.split_at(r);
    let rs_alpha = lb.alg_astar.anchor_of(alpha);
    // ⟨∇^*_{∂_k} α, a⟩
    let g: Sec = (0..n)
        .map(|k| section::dot(&conn.dual_covariant(&section::basis(n, k), alpha), a))
        .collect();
    let bas: Sec = (0..r)
        .map(|i| {
            let ei = section::basis(r, i);
            let mut v = conn.dual_covariant(&rs_alpha, &ei);
            section::add_assign(&mut v, &lb.alg_astar.bracket(&ei, alpha));
            section::dot(a, &v)
        })
        .collect();
    let mut first = bas;
    section::add_assign(&mut first, &conn.covariant(x, a));
    section::sub_assign(&mut first, &lb.rho_star_t(&g));
    let mut second = cartan::lie_derivative_1form(x, theta);
    section::add_assign(&mut second, &g);
    section::concat(&first, &second)
}

/// The adapted Dorfman connection, tabulated, together with the check that
/// the table reproduces the formula.
pub fn adapted_dorfman_poisson(
    lb: &LieBialgebroidData,
    conn: &LinearConnection,
    cfg: &CheckConfig,
) -> Result<(DorfmanConnection, Outcome)> {
    let f: &DeltaFormula = &|q, b| adapted_poisson_eval(lb, conn, q, b);
    let delta = dorfman_from_formula(lb.patch(), lb.rank(), f)?;
    let o = check_formula_agrees(&delta, f, cfg, "poisson.adapted_formula");
    Ok((delta, o))
}

/// `(A, graph(ρ_⋆), Δ)` for the adapted `Δ`.
pub fn poisson_triple(lb: &LieBialgebroidData, delta: DorfmanConnection) -> Result<LADiracTriple> {
    LADiracTriple::new(lb.alg_a.clone(), lb.graph_frame(), delta)
}

/// `⟦(ρ_⋆α₁,α₁),(ρ_⋆α₂,α₂)⟧_Δ = (ρ_⋆[α₁,α₂]_*, [α₁,α₂]_*)`.
pub fn check_poisson_restriction(lb: &LieBialgebroidData, delta: &DorfmanConnection, cfg: &CheckConfig) -> Outcome {
    let r = lb.rank();
    let graph = |al: &[Scalar]| section::concat(&lb.alg_astar.anchor_of(al), al);
    let mut s = Sampler::new(cfg, "poisson.u_restriction", lb.patch().dim());
    let randoms: Vec<Vec<Sec>> = (0..cfg.trials).map(|_| vec![s.section(r), s.section(r)]).collect();
    let mut o = Outcome::new("poisson.u_restriction");
    verify(
        &mut o,
        lb.patch(),
        &section::standard_frame(r),
        2,
        &randoms,
        |q| {
            let lhs = delta.dull_bracket(&graph(q[0]), &graph(q[1]));
            section::sub(&lhs, &graph(&lb.alg_astar.bracket(q[0], q[1])))
        },
        section::is_zero,
    );
    o
}

/// The identities used to see that `Φ` preserves brackets:
/// `ρ^t ℒ_{ρ(a)} θ = ℒ_a ρ^t θ` and
/// `ρ_⋆^t ℒ_{ρ(a)} θ = [a, ρ_⋆^t θ]_A − i_{ρ^tθ} d_* a`.
pub fn check_poisson_phi_identities(lb: &LieBialgebroidData, cfg: &CheckConfig) -> Outcome {
    let n = lb.patch().dim();
    let r = lb.rank();
    let mut s = Sampler::new(cfg, "poisson.phi_identities", n);
    let mut cases: Vec<(String, Vec<Sec>)> = Vec::new();
    for i in 0..r {
        for k in 0..n {
            cases.push((
                format!("frame (e{}, dx^{})", i + 1, k + 1),
                vec![section::basis(r, i), section::basis(n, k)],
            ));
        }
    }
    for t in 0..cfg.trials {
        cases.push((format!("random trial {}", t + 1), vec![s.section(r), s.section(n)]));
    }
    let mut o = Outcome::new("poisson.phi_identities");
    verify_labeled(
        &mut o,
        lb.patch(),
        &cases,
        |q| {
            let (a, theta) = (&q[0], &q[1]);
            let lt = cartan::lie_derivative_1form(&lb.alg_a.anchor_of(a), theta);
            let r1 = section::sub(
                &lb.alg_a.rho_t(&lt),
                &lb.alg_a.lie_derivative_dual(a, &lb.alg_a.rho_t(theta)),
            );
            let mut r2 = lb.rho_star_t(&lt);
            section::sub_assign(&mut r2, &lb.alg_a.bracket(a, &lb.rho_star_t(theta)));
            section::add_assign(&mut r2, &lb.alg_astar.contract_d(&lb.alg_a.rho_t(theta), a));
            section::concat(&r1, &r2)
        },
        section::is_zero,
    );
    o
}

/// The algebroid `graph(ρ_⋆)` with the bracket of `A*`, in its graph frame.
pub fn graph_algebroid(lb: &LieBialgebroidData) -> Result<DullAlgebroid> {
    let r = lb.rank();
    let n = lb.patch().dim();
    algebroid_on_frame("graph(rho_*)", lb.patch(), &lb.graph_frame(), |u, v| {
        let br = lb.alg_astar.bracket(&u[n..n + r], &v[n..n + r]);
        section::concat(&lb.alg_astar.anchor_of(&br), &br)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::all_pass;
    use crate::courant::check_courant_morphism;
    use crate::courant::degenerate_courant;

    fn pi_xy() -> (Patch, TwoForm) {
        let p = Patch::standard(2);
        let x = p.parse("x").unwrap();
        let pi = vec![vec![Scalar::zero(), x.clone()], vec![-&x, Scalar::zero()]];
        (p, pi)
    }

    #[test]
    fn poisson_double_is_courant() {
        let (p, pi) = pi_xy();
        let lb = LieBialgebroidData::poisson(&p, &pi).unwrap();
        let outs = check_lie_bialgebroid(&lb, &CheckConfig::default());
        assert!(all_pass(&outs), "{outs:#?}");
        assert!(check_anchor_anomaly(&lb).passed());
        assert!(check_poisson_phi_identities(&lb, &CheckConfig::default()).passed());
    }

    #[test]
    fn trivial_dual_phi() {
        let p = Patch::standard(2);
        let lb = LieBialgebroidData::trivial_dual(DullAlgebroid::tangent(&p));
        let cfg = CheckConfig::default();
        assert!(all_pass(&check_lie_bialgebroid(&lb, &cfg)));
        let (_, mp) = bialgebroid_from_lie_bialgebroid(&lb).unwrap();
        // Φ(a,θ) = (a, ρ^tθ)
        let v = crate::bundle::matrix::mat_vec(
            &mp.phi,
            &[p.parse("x").unwrap(), Scalar::zero(), Scalar::zero(), Scalar::one()],
        );
        assert_eq!(
            v,
            vec![p.parse("x").unwrap(), Scalar::zero(), Scalar::zero(), Scalar::one()]
        );
    }

    #[test]
    fn non_poisson_bivector_fails() {
        let p = Patch::standard(3);
        let e = |s: &str| p.parse(s).unwrap();
        let z = Scalar::zero();
        // {x,y} = z, {y,z} = z, {z,x} = y
        let pi = vec![
            vec![z.clone(), e("z"), e("-y")],
            vec![e("-z"), z.clone(), e("z")],
            vec![e("y"), e("-z"), z.clone()],
        ];
        let lb = LieBialgebroidData::poisson(&p, &pi).unwrap();
        let outs = check_lie_bialgebroid(&lb, &CheckConfig::default());
        let jac = outs.iter().find(|o| o.name == "lie_bialgebroid.A*.jacobi").unwrap();
        assert!(!jac.passed());
        assert!(!jac.witnesses.is_empty());
    }

    #[test]
    fn poisson_phi_and_adapted_connection() {
        let (p, pi) = pi_xy();
        let cfg = CheckConfig::default();
        let lb = LieBialgebroidData::poisson(&p, &pi).unwrap();
        let (_, mp) = bialgebroid_from_lie_bialgebroid(&lb).unwrap();
        let m = check_courant_morphism(&mp.phi, &degenerate_courant(&lb.alg_a), &mp.c, &cfg).unwrap();
        assert!(all_pass(&m), "{m:#?}");
        let conn = LinearConnection::trivial(2, 2);
        let (delta, agree) = adapted_dorfman_poisson(&lb, &conn, &cfg).unwrap();
        assert!(agree.passed(), "{agree:#?}");
        assert!(check_poisson_restriction(&lb, &delta, &cfg).passed());
        let t = poisson_triple(&lb, delta).unwrap();
        let la = crate::bialgebroid::check_la_dirac(&t, &cfg);
        assert!(all_pass(&la), "{la:#?}");
        let lem = crate::bialgebroid::verify_appendix_lemmas(&t, &cfg);
        assert!(all_pass(&lem), "{lem:#?}");
    }
}
