//! Acceptance criteria, one line each. Every pass is an exact zero residual.
//!
//! Run with `cargo test --test acceptance`. The process fails when a
//! criterion's verdict differs from the expected one; criteria known to be
//! unattainable are printed as FAIL together with the reason.

use std::sync::Arc;
use std::time::{Duration, Instant};

use diracbi::algebroid::DullBracket;
use diracbi::bialgebroid::{
    build_courant_c, check_complement_independence, check_la_dirac, sheared_complement, triple_from_bialgebroid,
    verify_appendix_lemmas, LADiracTriple,
};
use diracbi::bundle::matrix::mat_vec;
use diracbi::bundle::section::{self, Sec};
use diracbi::bundle::{Frame, Patch};
use diracbi::cartan::{lie_bracket_vf, lie_derivative_1form, TwoForm};
use diracbi::check::{all_pass, Outcome, Status};
use diracbi::cli::{Collector, Report};
use diracbi::courant::{
    check_courant_axioms, check_dirac, degenerate_courant, dirac_from_2form, dirac_from_foliation, dirac_from_poisson,
    standard_courant, Bracket,
};
use diracbi::sampling::CheckConfig;
use diracbi::scalar::Scalar;
use diracbi::zoo::*;

struct Verdict {
    ok: bool,
    /// Known to be unattainable; the reason is printed and recorded in the
    /// decisions ledger.
    red: Option<&'static str>,
    /// The mathematically correct behaviour that must hold regardless.
    sound: bool,
    detail: String,
    outcomes: Vec<Outcome>,
}

impl Verdict {
    fn new(ok: bool, detail: String, outcomes: Vec<Outcome>) -> Self {
        Verdict {
            ok,
            red: None,
            sound: true,
            detail,
            outcomes,
        }
    }
}

fn cfg() -> CheckConfig {
    CheckConfig::default()
}

fn find<'a>(outs: &'a [Outcome], name: &str) -> &'a Outcome {
    outs.iter()
        .find(|o| o.name == name)
        .unwrap_or_else(|| panic!("no outcome named {name}"))
}

fn passes(outs: &[Outcome], name: &str) -> bool {
    find(outs, name).passed()
}

fn fails_with_witness(outs: &[Outcome], name: &str) -> bool {
    let o = find(outs, name);
    o.status == Status::Fail && !o.witnesses.is_empty()
}

fn first_witness(o: &Outcome) -> String {
    o.witnesses.first().map_or_else(
        || "none".into(),
        |w| format!("{} → ({})", w.label, w.residual.join(", ")),
    )
}

fn two_form(p: &Patch, f: &str) -> TwoForm {
    let n = p.dim();
    let mut w = vec![vec![Scalar::zero(); n]; n];
    let f = p.parse(f).unwrap();
    w[1][0] = -&f;
    w[0][1] = f;
    w
}

fn prefixed(prefix: &str, outs: Vec<Outcome>) -> Vec<Outcome> {
    diracbi::check::prefixed(prefix, outs)
}

fn la_dirac_triple(preset_name: &str) -> LADiracTriple {
    let conn = |n, r| diracbi::algebroid::LinearConnection::trivial(n, r);
    match preset(preset_name).unwrap() {
        ZooInstance::LieBialgebroid(lb) => {
            let (d, _) = adapted_dorfman_poisson(&lb, &conn(lb.patch().dim(), lb.rank()), &cfg()).unwrap();
            poisson_triple(&lb, d).unwrap()
        }
        ZooInstance::Im2Form(im) => {
            let (d, _) = adapted_dorfman_presymplectic(&im, &conn(im.patch().dim(), im.alg.rank()), &cfg()).unwrap();
            presymplectic_triple(&im, d).unwrap()
        }
        ZooInstance::Iis(iis) => {
            let (d, _) = adapted_dorfman_iis(&iis, &cfg()).unwrap();
            iis_triple(&iis, d).unwrap()
        }
        ZooInstance::Bialgebra(_) => panic!("no adapted triple for bialgebras"),
    }
}

fn criterion1() -> Verdict {
    let p = Patch::standard(2);
    let cfg = CheckConfig {
        seed: 0,
        trials: 20,
        max_degree: 2,
    };
    let c = standard_courant(&p);
    let t = Instant::now();
    let outs = check_courant_axioms(&c, &cfg);
    let secs = t.elapsed();
    let axioms = (1..=5).all(|k| passes(&outs, &format!("courant.axiom{k}")));
    let dropped = c.clone().with_bracket(
        "dropped",
        Bracket::Formula(Arc::new(|c1, c2| {
            let n = c1.len() / 2;
            section::concat(
                &lie_bracket_vf(&c1[..n], &c2[..n]),
                &lie_derivative_1form(&c1[..n], &c2[n..]),
            )
        })),
    );
    let neg = check_courant_axioms(&dropped, &cfg);
    let a2 = fails_with_witness(&neg, "courant.axiom2");
    let a3 = fails_with_witness(&neg, "courant.axiom3");
    let others = [1, 4, 5].iter().all(|k| passes(&neg, &format!("courant.axiom{k}")));
    let fast = secs < Duration::from_secs(10);
    let mut all = prefixed("standard", outs);
    all.extend(prefixed("dropped", neg.clone()));
    Verdict {
        ok: axioms && fast && a2,
        red: Some("dropping i_{X₂}𝐝θ₁ cannot break axiom (2); it breaks axiom (3) instead"),
        sound: axioms && fast && !a2 && a3 && others,
        detail: format!(
            "axioms (1)-(5) {} in {:.2?} with 20 trials; dropped-term bracket: axiom (2) {}, axiom (3) {} [{}]",
            verdict(axioms),
            secs,
            verdict(!a2),
            verdict(!a3),
            first_witness(find(&neg, "courant.axiom3"))
        ),
        outcomes: all,
    }
}

fn verdict(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "fail"
    }
}

fn criterion2() -> Verdict {
    let p = Patch::standard(2);
    let std = standard_courant(&p);
    let f = Frame::new(vec![section::basis(2, 0)], 2).unwrap();
    let mut outs = Vec::new();
    let mut ok = true;
    for (name, sub) in [
        ("D_pi", dirac_from_poisson(&p, &two_form(&p, "x"))),
        ("D_omega", dirac_from_2form(&p, &two_form(&p, "1"))),
        ("D_F", dirac_from_foliation(&p, &f)),
    ] {
        let o = check_dirac(&std, sub.unwrap().vectors(), &cfg()).unwrap();
        ok &= all_pass(&o) && o.iter().any(|x| x.name == "dirac.restricted.jacobi");
        outs.extend(prefixed(name, o));
    }
    let p3 = Patch::standard(3);
    let neg = check_dirac(
        &standard_courant(&p3),
        dirac_from_2form(&p3, &two_form(&p3, "z")).unwrap().vectors(),
        &cfg(),
    )
    .unwrap();
    let closed_fails = fails_with_witness(&neg, "dirac.closed");
    let rest = passes(&neg, "dirac.isotropic") && passes(&neg, "dirac.lagrangian");
    let detail = format!(
        "D_π, D_ω, D_F certified with Lie restrictions: {}; z dx∧dy involutivity fails [{}]",
        verdict(ok),
        first_witness(find(&neg, "dirac.closed"))
    );
    outs.extend(prefixed("D_zomega", neg));
    Verdict::new(ok && closed_fails && rest, detail, outs)
}

fn criterion3() -> Verdict {
    let mut outs = Vec::new();
    let mut ok = true;
    let mut times = Vec::new();
    for name in ["poisson-xy", "presymplectic-dxdy"] {
        let t = Instant::now();
        let mp = build_courant_c(&la_dirac_triple(name)).unwrap();
        let o = check_courant_axioms(&mp.c, &cfg());
        let secs = t.elapsed();
        ok &= all_pass(&o) && secs < Duration::from_secs(60);
        times.push(format!("{name} {secs:.2?}"));
        outs.extend(prefixed(name, o));
    }
    Verdict::new(
        ok,
        format!("C of both triples satisfies the Courant axioms ({})", times.join(", ")),
        outs,
    )
}

fn criterion4() -> Verdict {
    let mut outs = Vec::new();
    let mut ok = true;
    for name in ["poisson-xy", "presymplectic-dxdy"] {
        let db = instance_bialgebroid(&preset(name).unwrap(), &cfg()).unwrap();
        let w2 = sheared_complement(&db.frame()).unwrap();
        let d1 = triple_from_bialgebroid(&db, None).unwrap().delta;
        let d2 = triple_from_bialgebroid(&db, Some(&w2)).unwrap().delta;
        let o = check_complement_independence(&db, None, &w2, 10, &cfg());
        ok &= d1.table != d2.table && o.passed();
        outs.push(Outcome {
            name: format!("{name}.{}", o.name),
            ..o
        });
    }
    Verdict::new(
        ok,
        "distinct Δ from two complements; C-brackets quotient-equal on frames and 10 random pairs".into(),
        outs,
    )
}

fn criterion5() -> Verdict {
    const LEMMAS: [&str; 5] = [
        "basic_like",
        "complicated",
        "eq_for_morphism",
        "intertwine_bas",
        "bialgebroid2",
    ];
    let mut outs = Vec::new();
    let mut ok = true;
    for name in ["poisson-xy", "presymplectic-dxdy", "foliation-x"] {
        let t = la_dirac_triple(name);
        let la = check_la_dirac(&t, &cfg());
        let lem = verify_appendix_lemmas(&t, &cfg());
        ok &= all_pass(&la) && LEMMAS.iter().all(|l| passes(&lem, &format!("lemma.{l}")));
        ok &= passes(&lem, "lemma.bialgebroid1") && passes(&lem, "lemma.cond5_equivalence");
        outs.extend(prefixed(name, lem));
    }
    let t = la_dirac_triple("iis-curved-negative");
    let la = check_la_dirac(&t, &cfg());
    let lem = verify_appendix_lemmas(&t, &cfg());
    let neg = fails_with_witness(&la, "la_dirac.cond5")
        && fails_with_witness(&lem, "lemma.bialgebroid1")
        && passes(&lem, "lemma.cond5_equivalence");
    let detail = format!(
        "five lemmas vanish on three LA-Dirac triples; curved mutant: condition (5) and bialgebroid1 both fail [{}]",
        first_witness(find(&lem, "lemma.bialgebroid1"))
    );
    outs.extend(prefixed("curved", lem));
    Verdict::new(ok && neg, detail, outs)
}

fn criterion6() -> Verdict {
    let outs = check_instance(&preset("poisson-xy").unwrap(), &cfg());
    let names = [
        "poisson.manin.phi_morphism",
        "lie_bialgebroid.anchor_anomaly",
        "poisson.phi_identities",
        "poisson.adapted_formula",
        "poisson.u_restriction",
    ];
    let ok = names.iter().all(|n| passes(&outs, n));
    Verdict::new(
        ok,
        "Φ is a Courant morphism, ρ∘ρ_⋆^t = −ρ_⋆∘ρ^t, Δ restricts to the A*-bracket on U".into(),
        outs,
    )
}

/// `Φ[a_i,a_j] − [Φa_i,Φa_j]` on frame sections of `A`.
fn morphism_residual(im: &IMTwoForm, i: usize, j: usize) -> Sec {
    let n = im.patch().dim();
    let r = im.alg.rank();
    let phi = im2form_phi(im);
    let deg = degenerate_courant(&im.alg);
    let std = standard_courant(im.patch());
    let a = |k| section::concat(&section::basis(r, k), &section::zero(n));
    let (ai, aj) = (a(i), a(j));
    section::sub(
        &mat_vec(&phi, &deg.bracket(&ai, &aj)),
        &std.bracket(&mat_vec(&phi, &ai), &mat_vec(&phi, &aj)),
    )
}

fn criterion7() -> Verdict {
    let mut outs = Vec::new();
    let mut ok = true;
    let mut detail = Vec::new();
    for (dim, f, closed) in [(2, "1", true), (3, "z", false)] {
        let p = Patch::standard(dim);
        let im = IMTwoForm::from_two_form(&p, &two_form(&p, f)).unwrap();
        let a = check_im2form(&im, &cfg());
        let b = check_im2form_morphism(&im, &cfg()).unwrap();
        ok &= all_pass(&a) == closed && all_pass(&b) == closed;
        // residuals agree up to one global sign: Φ-residual = (0, s·IM(2)-residual)
        let r = im.alg.rank();
        let mut signs = Vec::new();
        let mut nonzero = 0;
        for i in 0..r {
            for j in 0..r {
                let m = morphism_residual(&im, i, j);
                let c2 = im_condition2_residual(&im, &section::basis(r, i), &section::basis(r, j));
                if !section::is_zero(&c2) {
                    nonzero += 1;
                }
                let zero = section::zero(dim);
                for s in [1i64, -1] {
                    let scaled = section::scale(&Scalar::from_int(s), &c2);
                    if m == section::concat(&zero, &scaled) {
                        signs.push((i, j, s));
                    }
                }
            }
        }
        let consistent = [1i64, -1]
            .iter()
            .any(|s| (0..r * r).all(|k| signs.iter().any(|&(i, j, t)| i * r + j == k && t == *s)));
        ok &= consistent && (nonzero > 0) != closed;
        detail.push(format!(
            "{f} dx∧dy: IM {}, morphism {}, {nonzero} nonzero residual pairs",
            verdict(all_pass(&a)),
            verdict(all_pass(&b))
        ));
        outs.extend(prefixed(&format!("omega_{dim}"), a));
        outs.extend(prefixed(&format!("omega_{dim}"), b));
    }
    Verdict::new(ok, format!("{}; residuals agree up to sign", detail.join("; ")), outs)
}

fn criterion8() -> Verdict {
    let outs = check_instance(&preset("foliation-x").unwrap(), &cfg());
    let need = [
        "iis.flat",
        "iis.def.ideal",
        "iis.def.bracket",
        "iis.def.bott",
        "iis.alt.basic_tm",
        "iis.alt.basic_j",
        "iis.alt.basic_curvature",
        "iis.characterizations_agree",
        "abar.skew",
        "abar.jacobi",
        "abar.jacobiator_identity",
        "iis.manin.dirac",
        "iis.manin.phi_morphism",
        "iis.manin.span",
        "iis.manin.pairing_compat",
        "iis.maximal_isotropy",
    ];
    let ok = need.iter().all(|n| passes(&outs, n)) && all_pass(&outs);
    let neg = check_instance(&preset("iis-curved-negative").unwrap(), &cfg());
    let curved = fails_with_witness(&neg, "iis.flat") && fails_with_witness(&neg, "iis.u.jacobi");
    let detail = format!(
        "F_M = J = span{{∂x}} passes both characterizations, Ā Jacobi, Jacobiator identity and the Manin pair; curved ∇̃ fails flatness and F_M⊕J° Jacobi [{}]",
        first_witness(find(&neg, "iis.u.jacobi"))
    );
    let mut all = prefixed("foliation", outs);
    all.extend(prefixed("curved", neg));
    Verdict::new(ok && curved, detail, all)
}

fn criterion9() -> Verdict {
    let ZooInstance::Bialgebra(db) = preset("aff1-bialgebra").unwrap() else {
        panic!("aff1-bialgebra is a bialgebra")
    };
    let outs = check_dirac_bialgebra(&db, &cfg());
    let (ideal, _) = ideal_and_bialgebra_from(&db);
    let ok = all_pass(&outs)
        && passes(&outs, "bialgebra.ideal")
        && passes(&outs, "bialgebra.cocycle")
        && ideal == vec![section::basis(2, 1)];
    let g = vec![vec![vec![0, 0], vec![0, 1]], vec![vec![0, -1], vec![0, 0]]];
    let mutant = DiracBialgebraData::new(&g, &[vec![vec![0]]], &[vec![0, 1]]).unwrap();
    let neg = check_dirac_bialgebra(&mutant, &cfg());
    let mfail = fails_with_witness(&neg, "bialgebra.ideal");
    let detail = format!(
        "aff(1) with i = span{{e₂}}: Dirac bialgebra, p°-ideal and cocycle pass; non-ideal mutant fails [{}]",
        first_witness(find(&neg, "bialgebra.ideal"))
    );
    let mut all = prefixed("aff1", outs);
    all.extend(prefixed("mutant", neg));
    Verdict::new(ok && mfail, detail, all)
}

fn criterion10() -> Verdict {
    let mut outs = Vec::new();
    let mut ok = true;
    let mut n = 0;
    for p in PRESETS.iter().filter(|p| p.positive) {
        let db = instance_bialgebroid(&p.build().unwrap(), &cfg()).unwrap();
        let o = round_trip(&db);
        ok &= o.passed();
        n += 1;
        outs.push(Outcome {
            name: format!("{}.{}", p.name, o.name),
            ..o
        });
    }
    Verdict::new(
        ok,
        format!("bialgebroid → triple → bialgebroid equivalent for all {n} positive presets"),
        outs,
    )
}

type Criterion = (u8, &'static str, fn() -> Verdict);

const CRITERIA: &[Criterion] = &[
    (1, "standard Courant algebroid", criterion1),
    (2, "Dirac certification", criterion2),
    (3, "Courant algebroid of a triple", criterion3),
    (4, "extension independence", criterion4),
    (5, "auxiliary lemma suite", criterion5),
    (6, "cotangent bialgebroid", criterion6),
    (7, "IM-2-form iff morphism", criterion7),
    (8, "infinitesimal ideal systems", criterion8),
    (9, "Dirac bialgebras", criterion9),
    (10, "round trip", criterion10),
];

fn reports(verdicts: &[Verdict]) -> Vec<Report> {
    CRITERIA
        .iter()
        .zip(verdicts)
        .map(|((id, _, _), v)| {
            let mut col = Collector::new(&cfg());
            col.group(|| v.outcomes.clone());
            col.finish(&format!("criterion{id}"), "acceptance")
        })
        .collect()
}

fn json(rs: &[Report]) -> String {
    rs.iter().map(|r| r.without_timing().to_json()).collect()
}

fn main() {
    let mut unexpected = 0;
    let mut print = |id: u8, title: &str, v: &Verdict| {
        let mark = if v.ok { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {mark}  {title}: {}", v.detail);
        if let Some(why) = v.red {
            println!("              known red: {why}");
        }
        let expected = v.red.is_none();
        if v.ok != expected || !v.sound {
            println!("              UNEXPECTED verdict");
            unexpected += 1;
        }
    };
    let first: Vec<Verdict> = CRITERIA.iter().map(|(_, _, f)| f()).collect();
    for ((id, title, _), v) in CRITERIA.iter().zip(&first) {
        print(*id, title, v);
    }
    let again: Vec<Verdict> = CRITERIA.iter().map(|(_, _, f)| f()).collect();
    let (a, b) = (json(&reports(&first)), json(&reports(&again)));
    let same = a == b;
    let det = Verdict::new(
        same,
        format!(
            "repeated runs give byte-identical JSON reports ({} bytes, timing excluded)",
            a.len()
        ),
        Vec::new(),
    );
    print(11, "determinism", &det);
    if unexpected > 0 {
        eprintln!("{unexpected} criteria with unexpected verdicts");
        std::process::exit(1);
    }
}
