//! Infinitesimal ideal systems `(F_M, J, ∇)` given through an extension
//! `∇̃` of `∇`, the quotient algebroid `Ā = (F_M ⊕ A)/graph(−ρ|_J)`, the
//! A-Manin pair `(Ā ⊕ Ā*, F_M ⊕ J°)` and the adapted Dorfman connection.

use std::sync::Arc;

use super::{
    algebroid_on_frame, check_formula_agrees, dorfman_from_formula, dual_vectors, frame_of, outside_witness,
    DeltaFormula,
};
use crate::algebroid::{lie_checks, BasicConnections, DullAlgebroid, DullBracket, LinearConnection};
use crate::bialgebroid::{AManinPair, DiracBialgebroid, LADiracTriple};
use crate::bundle::matrix::{self, Mat};
use crate::bundle::section::{self, Sec};
use crate::bundle::{complement, Frame, Patch};
use crate::cartan;
use crate::check::{all_pass, prefixed, verify_labeled, Outcome};
use crate::courant::{Bracket, Carrier, CourantPresentation, QuotientBundle};
use crate::dorfman::DorfmanConnection;
use crate::error::{Error, Result};
use crate::sampling::{monomials_up_to, CheckConfig, Sampler};
use crate::scalar::{gcd, Poly, Scalar};

/// A Lie algebroid `A`, an involutive `F_M ⊆ TM`, a subbundle `J ⊆ A` with
/// `ρ(J) ⊆ F_M`, and a connection `∇̃` on `A` preserving `Γ(J)` along `F_M`.
#[derive(Clone, Debug, PartialEq)]
pub struct IISData {
    pub alg: DullAlgebroid,
    pub f_m: Frame,
    pub j: Frame,
    pub conn: LinearConnection,
}

impl IISData {
    pub fn new(alg: DullAlgebroid, f_m: Frame, j: Frame, conn: LinearConnection) -> Result<Self> {
        let n = alg.dim();
        let r = alg.rank();
        if f_m.ambient_rank() != n || j.ambient_rank() != r || conn.dim() != n || conn.rank != r {
            return Err(Error::Shape(format!(
                "F_M must live in TM (rank {n}), J and ∇̃ in A (rank {r})"
            )));
        }
        for (l, jl) in j.vectors().iter().enumerate() {
            if !f_m.contains(&alg.anchor_of(jl)) {
                return Err(Error::Precondition(format!("ρ(j{}) ∉ F_M", l + 1)));
            }
        }
        let fv = f_m.vectors();
        for i in 0..fv.len() {
            for k in i + 1..fv.len() {
                if !f_m.contains(&cartan::lie_bracket_vf(&fv[i], &fv[k])) {
                    return Err(Error::Precondition(format!(
                        "F_M is not involutive: [f{},f{}] ∉ F_M",
                        i + 1,
                        k + 1
                    )));
                }
            }
        }
        for (i, f) in fv.iter().enumerate() {
            for (l, jl) in j.vectors().iter().enumerate() {
                if !j.contains(&conn.covariant(f, jl)) {
                    return Err(Error::Precondition(format!("∇̃_{{f{}}} j{} ∉ J", i + 1, l + 1)));
                }
            }
        }
        Ok(IISData { alg, f_m, j, conn })
    }

    pub fn patch(&self) -> &Patch {
        &self.alg.patch
    }

    pub fn basic(&self) -> BasicConnections<'_> {
        BasicConnections {
            alg: &self.alg,
            conn: &self.conn,
        }
    }

    /// `J° ⊆ A*`.
    pub fn j_annihilator(&self) -> Vec<Sec> {
        self.j.annihilating_covectors()
    }
}

/// Polynomial sections of degree ≤ `degree` whose class in `A/J` is
/// `∇`-parallel, together with the frame of `J`. Parallelism is imposed
/// coefficientwise, so the list is exact for the ansatz.
pub fn parallel_sections(iis: &IISData, degree: u32) -> Vec<Sec> {
    let n = iis.patch().dim();
    let r = iis.alg.rank();
    let monos = monomials_up_to(n, degree);
    let unknowns: Vec<Sec> = monos
        .iter()
        .flat_map(|m| {
            let mono = Scalar::from_poly(Poly::monomial(*m, crate::scalar::rational(1, 1)));
            (0..r).map(move |c| section::scale(&mono, &section::basis(r, c)))
        })
        .collect();
    let ann = iis.j_annihilator();
    let mut rows: Vec<Sec> = Vec::new();
    for f in iis.f_m.vectors() {
        for w in &ann {
            let vals: Vec<Scalar> = unknowns
                .iter()
                .map(|u| section::dot(w, &iis.conn.covariant(f, u)))
                .collect();
            rows.extend(coefficient_rows(&vals));
        }
    }
    let mut out: Vec<Sec> = matrix::nullspace(&rows, unknowns.len())
        .iter()
        .map(|k| section::combine(k, &unknowns, r))
        .collect();
    out.extend(iis.j.vectors().iter().cloned());
    out
}

/// Rows of the ℚ-linear system `Σ k_u vals[u] = 0`, one per monomial of the
/// numerators over a common denominator.
fn coefficient_rows(vals: &[Scalar]) -> Vec<Sec> {
    let mut lcm = Poly::one();
    for v in vals.iter().filter(|v| !v.is_zero()) {
        let g = gcd(&lcm, v.denom());
        lcm = &lcm * &v.denom().div_exact(&g).expect("gcd divides");
    }
    let nums: Vec<Poly> = vals
        .iter()
        .map(|v| {
            if v.is_zero() {
                Poly::zero()
            } else {
                v.numer() * &lcm.div_exact(v.denom()).expect("denominator divides the lcm")
            }
        })
        .collect();
    let mut monos: Vec<_> = nums.iter().flat_map(|p| p.terms().iter().map(|(m, _)| *m)).collect();
    monos.sort();
    monos.dedup();
    monos
        .iter()
        .map(|m| {
            nums.iter()
                .map(|p| {
                    p.terms()
                        .iter()
                        .find(|(mm, _)| mm == m)
                        .map(|(_, c)| Scalar::from_rational(c.clone()))
                        .unwrap_or_else(Scalar::zero)
                })
                .collect()
        })
        .collect()
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (0..n).map(move |k| (i, k)))
}

/// The definition and the basic-connection characterization, checked
/// independently, with a cross-check that their verdicts agree.
pub fn check_iis(iis: &IISData, cfg: &CheckConfig) -> Vec<Outcome> {
    let patch = iis.patch();
    let n = patch.dim();
    let r = iis.alg.rank();
    let fv = iis.f_m.vectors();
    let jv = iis.j.vectors();
    let bas = iis.basic();
    let ea = section::standard_frame(r);
    let mut s = Sampler::new(cfg, "iis", n);
    let rand_f: Vec<Sec> = (0..cfg.trials).map(|_| s.in_span(fv, n)).collect();
    let rand_a: Vec<Sec> = (0..cfg.trials).map(|_| s.section(r)).collect();
    let rand_a2: Vec<Sec> = (0..cfg.trials).map(|_| s.section(r)).collect();
    let rand_j: Vec<Sec> = (0..cfg.trials).map(|_| s.in_span(jv, r)).collect();
    let rand_f2: Vec<Sec> = (0..cfg.trials).map(|_| s.in_span(fv, n)).collect();

    // R(X₁,X₂)a ∈ J for X₁,X₂ ∈ F_M
    let mut cases = Vec::new();
    for (i, k) in pairs(fv.len()) {
        for (c, e) in ea.iter().enumerate() {
            cases.push((
                format!("f{},f{}, e{}", i + 1, k + 1, c + 1),
                vec![fv[i].clone(), fv[k].clone(), e.clone()],
            ));
        }
    }
    for t in 0..cfg.trials {
        cases.push((
            format!("random trial {}", t + 1),
            vec![rand_f[t].clone(), rand_f2[t].clone(), rand_a[t].clone()],
        ));
    }
    let mut flat = Outcome::new("iis.flat");
    verify_labeled(
        &mut flat,
        patch,
        &cases,
        |q| outside_witness(&iis.j, &iis.conn.curvature(&q[0], &q[1], &q[2])),
        section::is_zero,
    );

    // ∇^bas_a X ∈ F_M
    let mut cases = Vec::new();
    for (c, e) in ea.iter().enumerate() {
        for (i, f) in fv.iter().enumerate() {
            cases.push((format!("e{}, f{}", c + 1, i + 1), vec![e.clone(), f.clone()]));
        }
    }
    for t in 0..cfg.trials {
        cases.push((
            format!("random trial {}", t + 1),
            vec![rand_a[t].clone(), rand_f[t].clone()],
        ));
    }
    let mut basic_tm = Outcome::new("iis.alt.basic_tm");
    verify_labeled(
        &mut basic_tm,
        patch,
        &cases,
        |q| outside_witness(&iis.f_m, &bas.on_tm(&q[0], &q[1])),
        section::is_zero,
    );

    // ∇^bas_a j ∈ J
    let mut cases = Vec::new();
    for (c, e) in ea.iter().enumerate() {
        for (l, jl) in jv.iter().enumerate() {
            cases.push((format!("e{}, j{}", c + 1, l + 1), vec![e.clone(), jl.clone()]));
        }
    }
    for t in 0..cfg.trials {
        cases.push((
            format!("random trial {}", t + 1),
            vec![rand_a[t].clone(), rand_j[t].clone()],
        ));
    }
    let mut basic_j = Outcome::new("iis.alt.basic_j");
    verify_labeled(
        &mut basic_j,
        patch,
        &cases,
        |q| outside_witness(&iis.j, &bas.on_a(&q[0], &q[1])),
        section::is_zero,
    );

    // R^bas(a₁,a₂)X ∈ J for X ∈ F_M
    let mut cases = Vec::new();
    for (c, d) in pairs(r) {
        for (i, f) in fv.iter().enumerate() {
            cases.push((
                format!("e{},e{}, f{}", c + 1, d + 1, i + 1),
                vec![ea[c].clone(), ea[d].clone(), f.clone()],
            ));
        }
    }
    for t in 0..cfg.trials {
        cases.push((
            format!("random trial {}", t + 1),
            vec![rand_a[t].clone(), rand_a2[t].clone(), rand_f[t].clone()],
        ));
    }
    let mut basic_curv = Outcome::new("iis.alt.basic_curvature");
    verify_labeled(
        &mut basic_curv,
        patch,
        &cases,
        |q| outside_witness(&iis.j, &bas.curvature(&q[0], &q[1], &q[2])),
        section::is_zero,
    );

    let par = parallel_sections(iis, cfg.max_degree + 1);
    let is_parallel = |a: &[Scalar]| -> Sec {
        fv.iter()
            .flat_map(|f| outside_witness(&iis.j, &iis.conn.covariant(f, a)))
            .collect()
    };

    // [a, j] ∈ J for parallel a
    let mut cases = Vec::new();
    for (p, a) in par.iter().enumerate() {
        for (l, jl) in jv.iter().enumerate() {
            cases.push((format!("parallel {}, j{}", p + 1, l + 1), vec![a.clone(), jl.clone()]));
        }
        for (t, jr) in rand_j.iter().enumerate().take(2) {
            cases.push((
                format!("parallel {}, random j {}", p + 1, t + 1),
                vec![a.clone(), jr.clone()],
            ));
        }
    }
    let mut ideal = Outcome::new("iis.def.ideal");
    verify_labeled(
        &mut ideal,
        patch,
        &cases,
        |q| outside_witness(&iis.j, &iis.alg.bracket(&q[0], &q[1])),
        section::is_zero,
    );

    // [a₁, a₂] parallel for parallel a₁, a₂
    let cases: Vec<_> = pairs(par.len())
        .filter(|(i, k)| i < k)
        .map(|(i, k)| {
            (
                format!("parallel {}, parallel {}", i + 1, k + 1),
                vec![par[i].clone(), par[k].clone()],
            )
        })
        .collect();
    let mut bracket = Outcome::new("iis.def.bracket");
    verify_labeled(
        &mut bracket,
        patch,
        &cases,
        |q| is_parallel(&iis.alg.bracket(&q[0], &q[1])),
        section::is_zero,
    );

    // ρ(a) is Bott-parallel for parallel a
    let mut cases = Vec::new();
    for (p, a) in par.iter().enumerate() {
        for (i, f) in fv.iter().enumerate() {
            cases.push((format!("parallel {}, f{}", p + 1, i + 1), vec![a.clone(), f.clone()]));
        }
        if let Some(fr) = rand_f.first() {
            cases.push((format!("parallel {}, random X", p + 1), vec![a.clone(), fr.clone()]));
        }
    }
    let mut bott = Outcome::new("iis.def.bott");
    verify_labeled(
        &mut bott,
        patch,
        &cases,
        |q| outside_witness(&iis.f_m, &cartan::lie_bracket_vf(&q[1], &iis.alg.anchor_of(&q[0]))),
        section::is_zero,
    );

    let alt = flat.passed() && basic_tm.passed() && basic_j.passed() && basic_curv.passed();
    let def = flat.passed() && ideal.passed() && bracket.passed() && bott.passed();
    let mut agree = Outcome::new("iis.characterizations_agree");
    agree.expect(
        alt == def,
        || format!("definition {def}, basic-connection characterization {alt}"),
        Vec::new(),
    );
    let agree = agree.with_note(format!(
        "definition: {}; basic connections: {}; {} parallel polynomial sections of degree ≤ {}",
        verdict(def),
        verdict(alt),
        par.len(),
        cfg.max_degree + 1
    ));
    vec![flat, basic_tm, basic_j, basic_curv, ideal, bracket, bott, agree]
}

fn verdict(b: bool) -> &'static str {
    if b {
        "holds"
    } else {
        "fails"
    }
}

fn failing(outcomes: &[Outcome]) -> Vec<String> {
    outcomes
        .iter()
        .filter(|o| !o.passed())
        .map(|o| o.name.clone())
        .collect()
}

/// `Ā = (F_M ⊕ A)/graph(−ρ|_J)` on representatives `(X, a)` of length
/// `dim + rank A`, as a quotient presentation.
#[derive(Clone, Debug)]
pub struct QuotientAlgebroid {
    pub iis: IISData,
    pub q: QuotientBundle,
    /// Quotient basis, graph frame and a complement of `F_M ⊕ A`.
    projection: Frame,
}

impl QuotientAlgebroid {
    /// Builds the presentation without checking any IIS condition.
    pub fn new(iis: &IISData) -> Result<Self> {
        let n = iis.patch().dim();
        let r = iis.alg.rank();
        let len = n + r;
        let mut adm: Vec<Sec> = iis
            .f_m
            .vectors()
            .iter()
            .map(|f| section::concat(f, &section::zero(r)))
            .collect();
        adm.extend((0..r).map(|c| section::concat(&section::zero(n), &section::basis(r, c))));
        let admissible = Frame::new(adm, len)?;
        let graph = Frame::new(iis.j.vectors().iter().map(|j| graph_vector(iis, j)).collect(), len)?;
        let q = QuotientBundle::new(admissible.clone(), graph.clone())?;
        let mut all = q.basis().to_vec();
        all.extend(graph.vectors().iter().cloned());
        all.extend(complement(&admissible).vectors().iter().cloned());
        let projection = Frame::new(all, len)?;
        Ok(QuotientAlgebroid {
            iis: iis.clone(),
            q,
            projection,
        })
    }

    pub fn len(&self) -> usize {
        self.q.ambient_len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.rank() == 0
    }

    /// `ρ̄(X ⊕ a) = X + ρ(a)`.
    pub fn anchor_rep(&self, u: &[Scalar]) -> Sec {
        let n = self.iis.patch().dim();
        section::add(&u[..n], &self.iis.alg.anchor_of(&u[n..]))
    }

    /// `([X₁,X₂] + ∇^bas_{a₁}X₂ − ∇^bas_{a₂}X₁) ⊕ ([a₁,a₂] + ∇̃_{X₁}a₂ − ∇̃_{X₂}a₁)`.
    pub fn rep_bracket(&self, u1: &[Scalar], u2: &[Scalar]) -> Sec {
        let n = self.iis.patch().dim();
        let (x1, a1) = u1.split_at(n);
        let (x2, a2) = u2.split_at(n);
        let bas = self.iis.basic();
        let c = &self.iis.conn;
        let mut x = cartan::lie_bracket_vf(x1, x2);
        section::add_assign(&mut x, &bas.on_tm(a1, x2));
        section::sub_assign(&mut x, &bas.on_tm(a2, x1));
        let mut a = self.iis.alg.bracket(a1, a2);
        section::add_assign(&mut a, &c.covariant(x1, a2));
        section::sub_assign(&mut a, &c.covariant(x2, a1));
        section::concat(&x, &a)
    }

    /// Quotient coordinates of any representative, projecting along a fixed
    /// complement of `F_M ⊕ A` when it is not admissible.
    pub fn reduce_any(&self, u: &[Scalar]) -> Sec {
        let mut c = self
            .projection
            .coords(u)
            .expect("projection frame spans the ambient bundle");
        c.truncate(self.q.rank());
        c
    }
}

fn graph_vector(iis: &IISData, j: &[Scalar]) -> Sec {
    section::concat(&section::neg(&iis.alg.anchor_of(j)), j)
}

impl DullBracket for QuotientAlgebroid {
    fn patch(&self) -> &Patch {
        self.iis.patch()
    }

    fn rank(&self) -> usize {
        self.q.rank()
    }

    fn anchor_of(&self, q: &[Scalar]) -> Sec {
        self.anchor_rep(&self.q.lift(q))
    }

    fn bracket(&self, q1: &[Scalar], q2: &[Scalar]) -> Sec {
        self.reduce_any(&self.rep_bracket(&self.q.lift(q1), &self.q.lift(q2)))
    }
}

/// `Ā`, provided `(F_M, J, ∇)` is an infinitesimal ideal system.
pub fn quotient_algebroid_abar(iis: &IISData, cfg: &CheckConfig) -> Result<QuotientAlgebroid> {
    let bad = failing(&check_iis(iis, cfg));
    if !bad.is_empty() {
        return Err(Error::Precondition(format!(
            "not an infinitesimal ideal system: {}",
            bad.join(", ")
        )));
    }
    QuotientAlgebroid::new(iis)
}

/// `j = [R^bas(a₁,a₂)X₃ − R(X₁,X₂)a₃] + c.p.`
pub fn jacobiator_correction(iis: &IISData, u: [&[Scalar]; 3]) -> Sec {
    let n = iis.patch().dim();
    let bas = iis.basic();
    let mut j = section::zero(iis.alg.rank());
    for k in 0..3 {
        let (x1, a1) = u[k].split_at(n);
        let (x2, a2) = u[(k + 1) % 3].split_at(n);
        let (x3, a3) = u[(k + 2) % 3].split_at(n);
        section::add_assign(&mut j, &bas.curvature(a1, a2, x3));
        section::sub_assign(&mut j, &iis.conn.curvature(x1, x2, a3));
    }
    j
}

/// Lie algebroid checks on `Ā` and the exact identity
/// `Jac(u₁,u₂,u₃) = (−ρ(j)) ⊕ j` on representatives. On failure the note
/// names the IIS conditions that break.
pub fn check_abar(iis: &IISData, cfg: &CheckConfig) -> Vec<Outcome> {
    let abar = match QuotientAlgebroid::new(iis) {
        Ok(a) => a,
        Err(e) => return vec![Outcome::error("abar", e.to_string())],
    };
    let n = iis.patch().dim();
    let r = iis.alg.rank();
    let mut out = lie_checks(&abar, cfg, "abar");

    let adm = abar.q.admissible.vectors().to_vec();
    let mut s = Sampler::new(cfg, "abar.jacobiator_identity", n);
    let mut cases: Vec<(String, Vec<Sec>)> = Vec::new();
    for i in 0..adm.len() {
        for k in i + 1..adm.len() {
            for l in k + 1..adm.len() {
                cases.push((
                    format!("frame ({},{},{})", i + 1, k + 1, l + 1),
                    vec![adm[i].clone(), adm[k].clone(), adm[l].clone()],
                ));
            }
        }
    }
    for t in 0..cfg.trials {
        cases.push((
            format!("random trial {}", t + 1),
            (0..3).map(|_| s.in_span(&adm, n + r)).collect(),
        ));
    }
    let mut ident = Outcome::new("abar.jacobiator_identity");
    verify_labeled(
        &mut ident,
        iis.patch(),
        &cases,
        |q| {
            let mut jac = section::zero(n + r);
            for k in 0..3 {
                let inner = abar.rep_bracket(&q[k], &q[(k + 1) % 3]);
                section::add_assign(&mut jac, &abar.rep_bracket(&inner, &q[(k + 2) % 3]));
            }
            let j = jacobiator_correction(iis, [&q[0], &q[1], &q[2]]);
            section::sub(&jac, &graph_vector(iis, &j))
        },
        section::is_zero,
    );
    out.push(ident);

    if !all_pass(&out) {
        let bad = failing(&check_iis(iis, cfg));
        let note = if bad.is_empty() {
            "the IIS conditions hold".to_string()
        } else {
            format!("broken IIS conditions: {}", bad.join(", "))
        };
        for o in out.iter_mut().filter(|o| !o.passed()) {
            o.note = Some(note.clone());
        }
    }
    out
}

/// Brackets of `Ā` built from two extensions of the same `∇` agree in the
/// quotient.
pub fn check_extension_independence(iis: &IISData, other: &LinearConnection, cfg: &CheckConfig) -> Outcome {
    let name = "abar.extension_independence";
    let r = iis.alg.rank();
    for (i, f) in iis.f_m.vectors().iter().enumerate() {
        for c in 0..r {
            let e = section::basis(r, c);
            let d = section::sub(&other.covariant(f, &e), &iis.conn.covariant(f, &e));
            if !iis.j.contains(&d) {
                return Outcome::error(
                    name,
                    format!("∇̃' does not extend ∇: (∇̃'−∇̃)_{{f{}}} e{} ∉ J", i + 1, c + 1),
                );
            }
        }
    }
    let iis2 = match IISData::new(iis.alg.clone(), iis.f_m.clone(), iis.j.clone(), other.clone()) {
        Ok(x) => x,
        Err(e) => return Outcome::error(name, e.to_string()),
    };
    let (a1, a2) = match (QuotientAlgebroid::new(iis), QuotientAlgebroid::new(&iis2)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Outcome::error(name, e.to_string()),
    };
    let adm = a1.q.admissible.vectors().to_vec();
    let len = a1.len();
    let mut s = Sampler::new(cfg, name, iis.patch().dim());
    let mut cases: Vec<(String, Vec<Sec>)> = pairs(adm.len())
        .map(|(i, k)| {
            (
                format!("frame ({},{})", i + 1, k + 1),
                vec![adm[i].clone(), adm[k].clone()],
            )
        })
        .collect();
    for t in 0..cfg.trials {
        cases.push((
            format!("random trial {}", t + 1),
            vec![s.in_span(&adm, len), s.in_span(&adm, len)],
        ));
    }
    let mut o = Outcome::new(name);
    verify_labeled(
        &mut o,
        iis.patch(),
        &cases,
        |q| {
            let d = section::sub(&a1.rep_bracket(&q[0], &q[1]), &a2.rep_bracket(&q[0], &q[1]));
            match a1.q.reduce(&d) {
                Some(c) => c,
                None => d,
            }
        },
        section::is_zero,
    );
    o
}

/// `F_M ⊕ J° ⊆ TM ⊕ A*` with anchor `pr_TM` and bracket
/// `([X₁,X₂], ∇̃*_{X₁}α₂ − ∇̃*_{X₂}α₁)`.
pub fn iis_u_frame(iis: &IISData) -> Result<Frame> {
    let n = iis.patch().dim();
    let r = iis.alg.rank();
    let mut v: Vec<Sec> = iis
        .f_m
        .vectors()
        .iter()
        .map(|f| section::concat(f, &section::zero(r)))
        .collect();
    v.extend(
        iis.j_annihilator()
            .iter()
            .map(|a| section::concat(&section::zero(n), a)),
    );
    frame_of(v, n + r, "F_M ⊕ J°")
}

pub fn iis_u_bracket(iis: &IISData, q1: &[Scalar], q2: &[Scalar]) -> Sec {
    let n = iis.patch().dim();
    let (x1, al1) = q1.split_at(n);
    let (x2, al2) = q2.split_at(n);
    let x = cartan::lie_bracket_vf(x1, x2);
    let al = section::sub(&iis.conn.dual_covariant(x1, al2), &iis.conn.dual_covariant(x2, al1));
    section::concat(&x, &al)
}

pub fn iis_u_algebroid(iis: &IISData) -> Result<DullAlgebroid> {
    let frame = iis_u_frame(iis)?;
    algebroid_on_frame("F_M⊕J°", iis.patch(), &frame, |a, b| iis_u_bracket(iis, a, b))
}

/// `Ā ⊕ Ā*` with the trivial Lie algebroid structure on `Ā*`, presented on
/// `(X, a, θ, β) ∈ TM ⊕ A ⊕ T*M ⊕ A*`. Sections of `Ā*` are classes of
/// pairs `(θ, β)` with `β(j) = θ(ρ(j))` for `j ∈ J`, modulo `F_M° ⊕ 0`.
pub fn iis_courant(abar: &QuotientAlgebroid) -> Result<CourantPresentation> {
    let iis = &abar.iis;
    let patch = iis.patch().clone();
    let n = patch.dim();
    let r = iis.alg.rank();
    let m = n + r;
    let len = 2 * m;
    let alg = &iis.alg;

    let mut adm: Vec<Sec> = abar
        .q
        .admissible
        .vectors()
        .iter()
        .map(|u| section::concat(u, &section::zero(m)))
        .collect();
    // β(j_l) − θ(ρ(j_l)) = 0
    let rows: Vec<Sec> = iis
        .j
        .vectors()
        .iter()
        .map(|j| section::concat(&section::neg(&alg.anchor_of(j)), j))
        .collect();
    adm.extend(
        matrix::nullspace(&rows, m)
            .iter()
            .map(|v| section::concat(&section::zero(m), v)),
    );
    let admissible = Frame::new(adm, len)?;
    let mut g: Vec<Sec> = abar
        .q
        .graph
        .vectors()
        .iter()
        .map(|u| section::concat(u, &section::zero(m)))
        .collect();
    g.extend(iis.f_m.annihilating_covectors().iter().map(|phi| {
        let mut v = section::zero(len);
        v[m..m + n].clone_from_slice(phi);
        v
    }));
    let graph = Frame::new(g, len)?;
    let q = QuotientBundle::new(admissible, graph)?;

    let anchor: Mat = (0..n)
        .map(|k| {
            let mut row = section::zero(len);
            row[k] = Scalar::one();
            row[n..m].clone_from_slice(&alg.anchor[k]);
            row
        })
        .collect();
    let mut pairing = vec![section::zero(len); len];
    for i in 0..m {
        pairing[i][m + i] = Scalar::one();
        pairing[m + i][i] = Scalar::one();
    }
    let d_map: Vec<Sec> = (0..n)
        .map(|k| {
            let mut v = section::zero(len);
            v[m + k] = Scalar::one();
            v[m + n..].clone_from_slice(&alg.anchor[k]);
            v
        })
        .collect();

    let fv: Vec<Sec> = iis.f_m.vectors().to_vec();
    let duals = dual_vectors(&fv, n)?;
    let ab = Arc::new(abar.clone());
    let bracket = Bracket::Formula(Arc::new(move |c1: &[Scalar], c2: &[Scalar]| {
        let (u1, xi1) = c1.split_at(m);
        let (u2, xi2) = c2.split_at(m);
        let u = ab.rep_bracket(u1, u2);
        let pair = |xi: &[Scalar], v: &[Scalar]| section::dot(xi, v);
        let r1 = ab.anchor_rep(u1);
        let r2 = ab.anchor_rep(u2);
        // ℒ_{u₁}ξ₂ − i_{u₂}dξ₁ evaluated on g
        let val = |g: &[Scalar]| -> Scalar {
            let lie = &cartan::apply_vf(&r1, &pair(xi2, g)) - &pair(xi2, &ab.rep_bracket(u1, g));
            let ip = &(&cartan::apply_vf(&r2, &pair(xi1, g)) - &cartan::apply_vf(&ab.anchor_rep(g), &pair(xi1, u2)))
                - &pair(xi1, &ab.rep_bracket(u2, g));
            &lie - &ip
        };
        let beta: Sec = (0..r)
            .map(|c| val(&section::concat(&section::zero(n), &section::basis(r, c))))
            .collect();
        let mut theta = section::zero(n);
        for (f, y) in fv.iter().zip(&duals) {
            let v = val(&section::concat(f, &section::zero(r)));
            if !v.is_zero() {
                section::axpy(&mut theta, &v, y);
            }
        }
        let mut out = u;
        out.extend(theta);
        out.extend(beta);
        out
    }));
    let c = CourantPresentation {
        name: "Ā⊕Ā*".into(),
        patch,
        carrier: Carrier::Quotient(q),
        anchor,
        pairing,
        d_map,
        bracket,
        degenerate: false,
    };
    c.validate()?;
    Ok(c)
}

/// `(A, F_M ⊕ J°, inclusion)` and the A-Manin pair `(Ā ⊕ Ā*, F_M ⊕ J°)` with
/// `Φ(a,θ) = (0 ⊕ a, (θ̄, ρ^tθ))`, built without checking the IIS
/// conditions.
pub fn iis_manin_pair(iis: &IISData) -> Result<(DiracBialgebroid, AManinPair)> {
    let n = iis.patch().dim();
    let r = iis.alg.rank();
    let m = n + r;
    let abar = QuotientAlgebroid::new(iis)?;
    let c = iis_courant(&abar)?;
    let u_alg = iis_u_algebroid(iis)?;
    let iota = iis_u_frame(iis)?.vectors().to_vec();
    let u_in_c: Vec<Sec> = iota
        .iter()
        .map(|v| {
            let mut w = section::zero(2 * m);
            w[..n].clone_from_slice(&v[..n]);
            w[m + n..].clone_from_slice(&v[n..]);
            w
        })
        .collect();
    let cols: Vec<Sec> = (0..r + n)
        .map(|col| {
            let mut w = section::zero(2 * m);
            if col < r {
                w[n + col] = Scalar::one();
            } else {
                let k = col - r;
                w[m + k] = Scalar::one();
                w[m + n..].clone_from_slice(&iis.alg.anchor[k]);
            }
            w
        })
        .collect();
    let phi: Mat = (0..2 * m)
        .map(|row| cols.iter().map(|v| v[row].clone()).collect())
        .collect();
    let db = DiracBialgebroid::new(iis.alg.clone(), u_alg.clone(), iota.clone())?;
    let mp = AManinPair {
        alg: iis.alg.clone(),
        c,
        u_in_c,
        iota,
        phi,
        u_bracket: Some(u_alg.structure),
    };
    Ok((db, mp))
}

/// [`iis_manin_pair`] for an infinitesimal ideal system.
pub fn bialgebroid_from_iis(iis: &IISData, cfg: &CheckConfig) -> Result<(DiracBialgebroid, AManinPair)> {
    let bad = failing(&check_iis(iis, cfg));
    if !bad.is_empty() {
        return Err(Error::Precondition(format!(
            "not an infinitesimal ideal system: {}",
            bad.join(", ")
        )));
    }
    iis_manin_pair(iis)
}

/// A random section of `Ā ⊕ Ā*` orthogonal to `F_M ⊕ J°` lies in it.
pub fn check_maximal_isotropy(mp: &AManinPair, cfg: &CheckConfig) -> Outcome {
    let name = "iis.maximal_isotropy";
    let c = &mp.c;
    let u: Vec<Sec> = match mp.u_in_c.iter().map(|v| c.coords(v)).collect::<Option<Vec<_>>>() {
        Some(u) => u,
        None => return Outcome::error(name, "F_M ⊕ J° is not admissible"),
    };
    let uf = match Frame::new(u, c.rank()) {
        Ok(f) => f,
        Err(e) => return Outcome::error(name, e.to_string()),
    };
    let gram = c.gram();
    let rows: Vec<Sec> = uf.vectors().iter().map(|v| matrix::mat_vec(&gram, v)).collect();
    let perp = matrix::nullspace(&rows, c.rank());
    let mut s = Sampler::new(cfg, name, c.dim());
    let cases: Vec<(String, Vec<Sec>)> = (0..cfg.trials)
        .map(|t| (format!("random trial {}", t + 1), vec![s.in_span(&perp, c.rank())]))
        .collect();
    let mut o = Outcome::new(name);
    verify_labeled(
        &mut o,
        &c.patch,
        &cases,
        |q| outside_witness(&uf, &q[0]),
        section::is_zero,
    );
    o
}

/// Both sides of the equivalence: the Lie algebroid checks of `F_M ⊕ J°`,
/// the A-Manin pair conditions and maximal isotropy.
pub fn check_iis_bialgebroid(iis: &IISData, cfg: &CheckConfig) -> Vec<Outcome> {
    let mut out = match iis_u_algebroid(iis) {
        Ok(u) => lie_checks(&u, cfg, "iis.u"),
        Err(e) => vec![Outcome::error("iis.u", e.to_string())],
    };
    match iis_manin_pair(iis) {
        Ok((_, mp)) => {
            out.extend(prefixed("iis", crate::bialgebroid::check_manin_pair(&mp, cfg)));
            out.push(check_maximal_isotropy(&mp, cfg));
        }
        Err(e) => out.push(Outcome::error("iis.manin", e.to_string())),
    }
    out
}

/// `Δ_{(X,α)}(a,θ) = (∇̃_X a, ℒ_Xθ + ⟨∇̃*_·α, a⟩)`.
pub fn adapted_iis_eval(iis: &IISData, q: &[Scalar], b: &[Scalar]) -> Sec {
    let n = iis.patch().dim();
    let r = iis.alg.rank();
    let (x, alpha) = q.split_at(n);
    let (a, theta) = b.split_at(r);
    let mut form = cartan::lie_derivative_1form(x, theta);
    for (k, f) in form.iter_mut().enumerate() {
        let g = section::dot(&iis.conn.dual_covariant(&section::basis(n, k), alpha), a);
        *f = &*f + &g;
    }
    section::concat(&iis.conn.covariant(x, a), &form)
}

pub fn adapted_dorfman_iis(iis: &IISData, cfg: &CheckConfig) -> Result<(DorfmanConnection, Outcome)> {
    let f: &DeltaFormula = &|q, b| adapted_iis_eval(iis, q, b);
    let delta = dorfman_from_formula(iis.patch(), iis.alg.rank(), f)?;
    let o = check_formula_agrees(&delta, f, cfg, "iis.adapted_formula");
    Ok((delta, o))
}

/// `(A, F_M ⊕ J°, Δ)`.
pub fn iis_triple(iis: &IISData, delta: DorfmanConnection) -> Result<LADiracTriple> {
    LADiracTriple::new(iis.alg.clone(), iis_u_frame(iis)?, delta)
}

/// The dual dull bracket of `Δ` restricts to the bracket of `F_M ⊕ J°`.
pub fn check_iis_restriction(iis: &IISData, delta: &DorfmanConnection, cfg: &CheckConfig) -> Outcome {
    let name = "iis.u_restriction";
    let frame = match iis_u_frame(iis) {
        Ok(f) => f,
        Err(e) => return Outcome::error(name, e.to_string()),
    };
    let v = frame.vectors().to_vec();
    let len = frame.ambient_rank();
    let mut s = Sampler::new(cfg, name, iis.patch().dim());
    let mut cases: Vec<(String, Vec<Sec>)> = pairs(v.len())
        .map(|(i, k)| (format!("frame ({},{})", i + 1, k + 1), vec![v[i].clone(), v[k].clone()]))
        .collect();
    for t in 0..cfg.trials {
        cases.push((
            format!("random trial {}", t + 1),
            vec![s.in_span(&v, len), s.in_span(&v, len)],
        ));
    }
    let mut o = Outcome::new(name);
    verify_labeled(
        &mut o,
        iis.patch(),
        &cases,
        |q| section::sub(&delta.dull_bracket(&q[0], &q[1]), &iis_u_bracket(iis, &q[0], &q[1])),
        section::is_zero,
    );
    o
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bialgebroid::{check_la_dirac, check_manin_pair};
    use crate::check::all_pass;

    fn tm2() -> DullAlgebroid {
        DullAlgebroid::tangent(&Patch::standard(2))
    }

    fn dx() -> Frame {
        Frame::new(vec![section::basis(2, 0)], 2).unwrap()
    }

    fn foliation() -> IISData {
        IISData::new(tm2(), dx(), dx(), LinearConnection::trivial(2, 2)).unwrap()
    }

    fn curved() -> IISData {
        let mut conn = LinearConnection::trivial(2, 2);
        conn.gamma[1][1] = vec![Scalar::zero(), Scalar::var(0)];
        IISData::new(tm2(), Frame::standard(2), dx(), conn).unwrap()
    }

    #[test]
    fn foliation_is_iis() {
        let cfg = CheckConfig::default();
        let iis = foliation();
        let outs = check_iis(&iis, &cfg);
        assert!(all_pass(&outs), "{outs:#?}");
        // a₂ independent of x
        let par = parallel_sections(&iis, 2);
        assert!(par.iter().all(|a| a[1].derivative(0).is_zero()));
        assert!(par.len() > 6);
        let ab = check_abar(&iis, &cfg);
        assert!(all_pass(&ab), "{ab:#?}");
        assert_eq!(quotient_algebroid_abar(&iis, &cfg).unwrap().q.rank(), 2);
    }

    #[test]
    fn foliation_manin_pair() {
        let cfg = CheckConfig::default();
        let iis = foliation();
        let outs = check_iis_bialgebroid(&iis, &cfg);
        assert!(all_pass(&outs), "{outs:#?}");
        let (_, mp) = bialgebroid_from_iis(&iis, &cfg).unwrap();
        let ax = crate::courant::check_courant_axioms(&mp.c, &cfg);
        assert!(all_pass(&ax), "{ax:#?}");
        let (delta, agree) = adapted_dorfman_iis(&iis, &cfg).unwrap();
        assert!(agree.passed());
        assert!(check_iis_restriction(&iis, &delta, &cfg).passed());
        let t = iis_triple(&iis, delta).unwrap();
        assert!(all_pass(&check_la_dirac(&t, &cfg)));
        assert!(all_pass(&check_manin_pair(&mp, &cfg)));
    }

    #[test]
    fn extension_independence() {
        let cfg = CheckConfig::default();
        let iis = foliation();
        let mut other = LinearConnection::trivial(2, 2);
        other.gamma[0][1] = vec![Scalar::var(1), Scalar::zero()];
        other.gamma[1][0] = vec![Scalar::zero(), Scalar::var(0)];
        let o = check_extension_independence(&iis, &other, &cfg);
        assert!(o.passed(), "{o:#?}");
        // the representatives themselves differ
        let a1 = QuotientAlgebroid::new(&iis).unwrap();
        let iis2 = IISData::new(iis.alg.clone(), iis.f_m.clone(), iis.j.clone(), other).unwrap();
        let a2 = QuotientAlgebroid::new(&iis2).unwrap();
        let u = section::concat(&section::basis(2, 0), &section::zero(2));
        let v = section::concat(&section::zero(2), &section::basis(2, 1));
        assert_ne!(a1.rep_bracket(&u, &v), a2.rep_bracket(&u, &v));
    }

    #[test]
    fn curved_mutant_fails_both_sides() {
        let cfg = CheckConfig::default();
        let iis = curved();
        let outs = check_iis(&iis, &cfg);
        let get = |n: &str| outs.iter().find(|o| o.name == n).unwrap().passed();
        assert!(!get("iis.flat"));
        assert!(get("iis.characterizations_agree"));
        assert!(quotient_algebroid_abar(&iis, &cfg).is_err());
        let ab = check_abar(&iis, &cfg);
        let jac = ab.iter().find(|o| o.name == "abar.jacobi").unwrap();
        assert!(!jac.passed());
        assert!(jac.note.as_deref().unwrap().contains("iis.flat"));
        assert!(ab
            .iter()
            .find(|o| o.name == "abar.jacobiator_identity")
            .unwrap()
            .passed());
        let bi = check_iis_bialgebroid(&iis, &cfg);
        assert!(!bi.iter().find(|o| o.name == "iis.u.jacobi").unwrap().passed());
        assert!(!all_pass(&bi));
    }

    #[test]
    fn zero_foliation_gives_a() {
        let cfg = CheckConfig::default();
        let alg = tm2();
        let iis = IISData::new(
            alg.clone(),
            Frame::new(vec![], 2).unwrap(),
            Frame::new(vec![], 2).unwrap(),
            LinearConnection::trivial(2, 2),
        )
        .unwrap();
        assert!(all_pass(&check_iis(&iis, &cfg)));
        let ab = QuotientAlgebroid::new(&iis).unwrap();
        for i in 0..2 {
            for k in 0..2 {
                let b = ab.bracket(&section::basis(2, i), &section::basis(2, k));
                assert_eq!(b, alg.structure[i][k]);
            }
        }
        assert!(all_pass(&check_iis_bialgebroid(&iis, &cfg)));
    }
}
