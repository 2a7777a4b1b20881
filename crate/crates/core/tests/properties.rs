use proptest::prelude::*;

use diracbi::algebroid::lie_checks;
use diracbi::bundle::matrix::{mat_vec, nullspace, rank};
use diracbi::bundle::section::{self, Sec};
use diracbi::bundle::{Frame, Patch};
use diracbi::cartan::{apply_vf, d_function, d_oneform, lie_bracket_vf, TwoForm};
use diracbi::check::all_pass;
use diracbi::cli::{emit, parse_instance};
use diracbi::courant::{check_courant_axioms, check_dirac, dirac_from_2form, dirac_from_poisson, standard_courant};
use diracbi::sampling::{CheckConfig, Sampler};
use diracbi::scalar::{gcd, Scalar};
use diracbi::zoo::*;

/// Monomials of degree ≤ 2 in `dim` variables, as exponent lists.
fn monomials(dim: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0; dim]];
    for i in 0..dim {
        let mut e = vec![0; dim];
        e[i] = 1;
        out.push(e);
    }
    for i in 0..dim {
        for j in i..dim {
            let mut e = vec![0; dim];
            e[i] += 1;
            e[j] += 1;
            out.push(e);
        }
    }
    out
}

fn poly(dim: usize, coeffs: &[i64]) -> Scalar {
    monomials(dim).iter().zip(coeffs).fold(Scalar::zero(), |acc, (e, &c)| {
        let m = e
            .iter()
            .enumerate()
            .fold(Scalar::from_int(c), |m, (i, &k)| &m * &Scalar::var(i).pow(k));
        &acc + &m
    })
}

fn coeffs(dim: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, monomials(dim).len())
}

/// A rational function `p/q` with `q ≠ 0`.
fn ratfun(dim: usize) -> impl Strategy<Value = (Vec<i64>, Vec<i64>)> {
    (coeffs(dim), coeffs(dim))
}

fn build(dim: usize, (p, q): &(Vec<i64>, Vec<i64>)) -> Scalar {
    let q = poly(dim, q);
    let q = if q.is_zero() { Scalar::one() } else { q };
    div(&poly(dim, p), &q)
}

fn div(a: &Scalar, b: &Scalar) -> Scalar {
    (a / b).unwrap()
}

fn vf(dim: usize, cs: &[Vec<i64>]) -> Sec {
    cs.iter().take(dim).map(|c| poly(dim, c)).collect()
}

fn vfs(dim: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(coeffs(dim), dim)
}

fn two_form(dim: usize, f: Scalar) -> TwoForm {
    let mut w = vec![vec![Scalar::zero(); dim]; dim];
    w[1][0] = -&f;
    w[0][1] = f;
    w
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn field_axioms(a in ratfun(2), b in ratfun(2), c in ratfun(2)) {
        let (a, b, c) = (build(2, &a), build(2, &b), build(2, &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        if !b.is_zero() {
            prop_assert_eq!(div(&(&a * &b), &b), a.clone());
            prop_assert!((&b * &b.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn reduced_form_is_canonical(p in coeffs(2), q in coeffs(2), r in coeffs(2)) {
        let (p, q, r) = (poly(2, &p), poly(2, &q), poly(2, &r));
        prop_assume!(!q.is_zero() && !r.is_zero());
        let f = div(&(&p * &q), &(&q * &r));
        prop_assert_eq!(f.clone(), div(&p, &r));
        prop_assert!(gcd(f.numer(), f.denom()).is_constant());
        let (pr, qr) = (p.numer() * r.numer(), q.numer() * r.numer());
        let g = gcd(&pr, &qr);
        prop_assert!(g.div_exact(r.numer()).is_some());
        prop_assert!(pr.div_exact(&g).is_some() && qr.div_exact(&g).is_some());
    }

    #[test]
    fn derivatives_obey_leibniz(a in ratfun(2), b in ratfun(2)) {
        let (a, b) = (build(2, &a), build(2, &b));
        for v in 0..2 {
            prop_assert_eq!((&a * &b).derivative(v), &(&a.derivative(v) * &b) + &(&a * &b.derivative(v)));
        }
        prop_assert_eq!(a.derivative(0).derivative(1), a.derivative(1).derivative(0));
        if !b.is_zero() {
            let q = div(&a, &b).derivative(0);
            prop_assert_eq!(q, div(&(&(&a.derivative(0) * &b) - &(&a * &b.derivative(0))), &(&b * &b)));
        }
    }

    #[test]
    fn print_parse_round_trip(a in ratfun(3)) {
        let p = Patch::standard(3);
        let a = build(3, &a);
        prop_assert_eq!(p.parse(&p.show(&a)).unwrap(), a.clone());
        let q = Patch::new(["u", "v", "w"]).unwrap();
        prop_assert_eq!(q.parse(&q.show(&a)).unwrap(), a);
    }

    #[test]
    fn vector_field_bracket(x in vfs(2), y in vfs(2), z in vfs(2), f in ratfun(2)) {
        let (x, y, z, f) = (vf(2, &x), vf(2, &y), vf(2, &z), build(2, &f));
        prop_assert_eq!(lie_bracket_vf(&x, &y), section::neg(&lie_bracket_vf(&y, &x)));
        let jac = section::add(
            &section::add(
                &lie_bracket_vf(&x, &lie_bracket_vf(&y, &z)),
                &lie_bracket_vf(&y, &lie_bracket_vf(&z, &x)),
            ),
            &lie_bracket_vf(&z, &lie_bracket_vf(&x, &y)),
        );
        prop_assert!(section::is_zero(&jac));
        let lhs = apply_vf(&lie_bracket_vf(&x, &y), &f);
        let rhs = &apply_vf(&x, &apply_vf(&y, &f)) - &apply_vf(&y, &apply_vf(&x, &f));
        prop_assert_eq!(lhs, rhs);
        prop_assert!(d_oneform(&d_function(&f, 2)).iter().all(|row| section::is_zero(row)));
    }

    #[test]
    fn nullspace_and_rank(rows in prop::collection::vec(coeffs(2), 1..4), ncols in 2usize..5) {
        let m: Vec<Sec> = rows
            .chunks(1)
            .map(|c| (0..ncols).map(|j| poly(2, &c[0]).derivative(j % 2).pow(j as u32 / 2) ).collect())
            .collect();
        let ns = nullspace(&m, ncols);
        for v in &ns {
            prop_assert!(section::is_zero(&mat_vec(&m, v)));
        }
        prop_assert_eq!(rank(&m, ncols) + ns.len(), ncols);
        let frame_ok = Frame::new(ns.clone(), ncols).is_ok();
        prop_assert!(frame_ok || ns.is_empty());
    }

    #[test]
    fn sampler_is_deterministic(seed in any::<u64>(), name in "[a-z.]{1,12}") {
        let cfg = CheckConfig { seed, trials: 4, max_degree: 2 };
        let mut a = Sampler::new(&cfg, &name, 2);
        let mut b = Sampler::new(&cfg, &name, 2);
        prop_assert_eq!(a.section(3), b.section(3));
        prop_assert_eq!(a.scalar(), b.scalar());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn standard_courant_axioms_for_every_seed(seed in any::<u64>()) {
        let cfg = CheckConfig { seed, trials: 3, max_degree: 2 };
        prop_assert!(all_pass(&check_courant_axioms(&standard_courant(&Patch::standard(2)), &cfg)));
    }

    /// Every bivector on the plane is Poisson: its graph is Dirac and the
    /// Koszul bracket is a Lie algebroid.
    #[test]
    fn planar_bivectors_are_poisson(f in coeffs(2), seed in 0u64..1000) {
        let p = Patch::standard(2);
        let cfg = CheckConfig { seed, trials: 3, max_degree: 2 };
        let pi = two_form(2, poly(2, &f));
        let d = dirac_from_poisson(&p, &pi).unwrap();
        prop_assert!(all_pass(&check_dirac(&standard_courant(&p), d.vectors(), &cfg).unwrap()));
        let lb = LieBialgebroidData::poisson(&p, &pi).unwrap();
        prop_assert!(all_pass(&lie_checks(&lb.alg_astar, &cfg, "koszul")));
        prop_assert!(check_anchor_anomaly(&lb).passed());
    }

    /// `f dx∧dy` on ℝ³ is closed iff `∂f/∂z = 0`; the graph, the IM
    /// conditions and the morphism Φ_σ all see exactly that.
    #[test]
    fn closedness_decides_every_check(f in coeffs(3)) {
        let p = Patch::standard(3);
        let f = poly(3, &f);
        let closed = f.derivative(2).is_zero();
        let cfg = CheckConfig { seed: 0, trials: 3, max_degree: 2 };
        let w = two_form(3, f);
        let graph = dirac_from_2form(&p, &w).unwrap();
        let dirac = check_dirac(&standard_courant(&p), graph.vectors(), &cfg).unwrap();
        prop_assert_eq!(dirac.iter().find(|o| o.name == "dirac.closed").unwrap().passed(), closed);
        let im = IMTwoForm::from_two_form(&p, &w).unwrap();
        prop_assert_eq!(all_pass(&check_im2form(&im, &cfg)), closed);
        prop_assert_eq!(all_pass(&check_im2form_morphism(&im, &cfg).unwrap()), closed);
    }

    #[test]
    fn emitted_instances_round_trip(f in coeffs(2), g in coeffs(2)) {
        let p = Patch::standard(2);
        let lb = LieBialgebroidData::poisson(&p, &two_form(2, poly(2, &f))).unwrap();
        let im = IMTwoForm::from_two_form(&p, &two_form(2, poly(2, &g))).unwrap();
        for z in [ZooInstance::LieBialgebroid(lb), ZooInstance::Im2Form(im)] {
            let text = emit(&z);
            let back = parse_instance("prop", &text).unwrap();
            prop_assert_eq!(&back.families()[0], &z);
        }
    }
}
