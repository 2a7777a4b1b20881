//! Dirac bialgebras `(g, p, ι: p → g*)`: Dirac bialgebroids over a point,
//! presented on a one-dimensional dummy patch with constant structure
//! constants and zero anchors.

use super::{courant_double, dual_vectors, frame_of, LieBialgebroidData};
use crate::algebroid::{lie_checks, merge, DullAlgebroid, DullBracket};
use crate::bialgebroid::DiracBialgebroid;
use crate::bundle::matrix::{self, Mat};
use crate::bundle::section::{self, Sec};
use crate::bundle::{membership, Frame, Membership, Patch};
use crate::check::{prefixed, Outcome};
use crate::courant::{check_courant_axioms, check_dirac, CourantPresentation};
use crate::error::{Error, Result};
use crate::sampling::CheckConfig;
use crate::scalar::Scalar;

/// Lie algebras `g` and `p` with an injective linear map `ι: p → g*`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiracBialgebraData {
    pub g: DullAlgebroid,
    pub p: DullAlgebroid,
    /// `iota[m] = ι(ξ_m) ∈ g*`.
    pub iota: Vec<Sec>,
}

/// The one-point base, as a one-dimensional patch whose coordinate is unused.
pub fn point_patch() -> Patch {
    Patch::standard(1)
}

impl DiracBialgebraData {
    /// `g_structure[i][j]` and `p_structure[i][j]` are the constant
    /// coefficients of `[e_i, e_j]`.
    pub fn new(g_structure: &[Vec<Vec<i64>>], p_structure: &[Vec<Vec<i64>>], iota: &[Vec<i64>]) -> Result<Self> {
        let patch = point_patch();
        let g = DullAlgebroid::lie_algebra(&patch, g_structure)?;
        let p = DullAlgebroid::lie_algebra(&patch, p_structure)?;
        let iota: Vec<Sec> = iota
            .iter()
            .map(|v| v.iter().map(|&k| Scalar::from_int(k)).collect())
            .collect();
        Self::from_parts(g, p, iota)
    }

    pub fn from_parts(g: DullAlgebroid, p: DullAlgebroid, iota: Vec<Sec>) -> Result<Self> {
        if iota.len() != p.rank() {
            return Err(Error::Shape("ι needs one image per basis vector of p".into()));
        }
        frame_of(iota.clone(), g.rank(), "ι(p)")?;
        Ok(DiracBialgebraData { g, p, iota })
    }

    /// `p° ⊆ g`.
    pub fn p_annihilator(&self) -> Vec<Sec> {
        matrix::nullspace(&self.iota, self.g.rank())
    }

    /// Representatives `x_a ∈ g` of a basis of `g/p°`, dual to `ι(ξ_m)`.
    pub fn quotient_basis(&self) -> Vec<Sec> {
        dual_vectors(&self.iota, self.g.rank()).expect("ι is injective")
    }

    /// `g/p°` with `[x_a, x_b] = Σ_m ι(ξ_m)([x_a, x_b]) x_m`.
    pub fn quotient(&self) -> DullAlgebroid {
        let x = self.quotient_basis();
        let k = x.len();
        let structure = (0..k)
            .map(|a| {
                (0..k)
                    .map(|b| {
                        let br = self.g.bracket(&x[a], &x[b]);
                        self.iota.iter().map(|w| section::dot(w, &br)).collect()
                    })
                    .collect()
            })
            .collect();
        DullAlgebroid::new("g/p°", &self.g.patch, vec![section::zero(k); 1], structure).expect("shapes agree")
    }

    /// The candidate `(g/p°, p)` with `p` acting as the dual of `g/p°`.
    pub fn lie_bialgebra(&self) -> LieBialgebroidData {
        LieBialgebroidData::new(self.quotient(), self.p.clone()).expect("ranks agree")
    }

    /// `Φ(x) = (x mod p°, 0)` as a `2k × dim g` matrix.
    pub fn phi(&self) -> Mat {
        let k = self.p.rank();
        (0..2 * k)
            .map(|row| {
                if row < k {
                    self.iota[row].clone()
                } else {
                    section::zero(self.g.rank())
                }
            })
            .collect()
    }

    /// `(g, p, (0, ι))` as a Dirac bialgebroid over the dummy patch.
    pub fn bialgebroid(&self) -> Result<DiracBialgebroid> {
        let iota = self
            .iota
            .iter()
            .map(|v| section::concat(&[Scalar::zero()], v))
            .collect();
        DiracBialgebroid::new(self.g.clone(), self.p.clone(), iota)
    }
}

/// `[ξ, η]([x,y]) = [ξ∘ad_x, η](y) + [ξ, η∘ad_x](y) − [ξ∘ad_y, η](x) −
/// [ξ, η∘ad_y](x)` on `q = g/p°` with `q* = p`: the dual of the bracket of
/// `p` is a 1-cocycle.
pub fn check_bialgebra_cocycle(q: &DullAlgebroid, p: &DullAlgebroid) -> Outcome {
    let mut o = Outcome::new("bialgebra.cocycle");
    let k = q.rank();
    let e = section::standard_frame(k);
    // (ξ∘ad_x)(y) = ξ([x,y])
    let co_ad =
        |xi: &[Scalar], x: &[Scalar]| -> Sec { (0..k).map(|b| section::dot(xi, &q.bracket(x, &e[b]))).collect() };
    for (xi_i, xi) in e.iter().enumerate() {
        for (eta_i, eta) in e.iter().enumerate() {
            for (xa, x) in e.iter().enumerate() {
                for (yb, y) in e.iter().enumerate() {
                    let lhs = section::dot(&p.bracket(xi, eta), &q.bracket(x, y));
                    let mut rhs = section::dot(&p.bracket(&co_ad(xi, x), eta), y);
                    rhs = &rhs + &section::dot(&p.bracket(xi, &co_ad(eta, x)), y);
                    rhs = &rhs - &section::dot(&p.bracket(&co_ad(xi, y), eta), x);
                    rhs = &rhs - &section::dot(&p.bracket(xi, &co_ad(eta, y)), x);
                    o.expect_zero(
                        &q.patch,
                        || format!("ξ{}, η{}, x{}, y{}", xi_i + 1, eta_i + 1, xa + 1, yb + 1),
                        &[&lhs - &rhs],
                    );
                }
            }
        }
    }
    o
}

/// `p° ⊆ g` is an ideal.
pub fn check_bialgebra_ideal(db: &DiracBialgebraData) -> Outcome {
    let mut o = Outcome::new("bialgebra.ideal");
    let ann = db.p_annihilator();
    let g = &db.g;
    let frame = match Frame::new(ann.clone(), g.rank()) {
        Ok(f) => f,
        Err(e) => return Outcome::error("bialgebra.ideal", e.to_string()),
    };
    for i in 0..g.rank() {
        for (l, v) in ann.iter().enumerate() {
            let b = g.bracket(&section::basis(g.rank(), i), v);
            if let Membership::NotMember(w) = membership(&b, &frame) {
                let label = format!("[e{}, v{}] = ({}) ∉ p°", i + 1, l + 1, g.patch.show_all(&b).join(", "));
                o.fail(label, g.patch.show_all(&[section::dot(&w, &b)]));
            }
        }
    }
    o
}

/// The quadratic Lie algebra `m = g/p° ⊕ p` of the candidate bialgebra.
pub fn bialgebra_double(db: &DiracBialgebraData) -> CourantPresentation {
    courant_double(&db.lie_bialgebra())
}

/// Input certification, the ideal and cocycle conditions, and conditions
/// (1)–(4) for `Φ: g → m` with `p = 0 ⊕ p ⊆ m`.
pub fn check_dirac_bialgebra(db: &DiracBialgebraData, cfg: &CheckConfig) -> Vec<Outcome> {
    let mut out = Vec::new();
    out.push(merge("bialgebra.g", &lie_checks(&db.g, cfg, "g")));
    out.push(merge("bialgebra.p", &lie_checks(&db.p, cfg, "p")));
    out.push(check_bialgebra_ideal(db));
    let q = db.quotient();
    out.push(check_bialgebra_cocycle(&q, &db.p));

    let m = bialgebra_double(db);
    out.extend(prefixed("bialgebra.m", check_courant_axioms(&m, cfg)));
    let k = db.p.rank();
    let phi = db.phi();
    let gr = db.g.rank();
    let ge = section::standard_frame(gr);
    let img: Vec<Sec> = ge.iter().map(|x| matrix::mat_vec(&phi, x)).collect();
    let p_in_m: Vec<Sec> = (0..k).map(|i| section::basis(2 * k, k + i)).collect();
    let patch = &db.g.patch;

    let mut iso = Outcome::new("bialgebra.isotropic_image");
    for a in 0..gr {
        for b in a..gr {
            iso.expect_zero(patch, || format!("e{}, e{}", a + 1, b + 1), &[m.pair(&img[a], &img[b])]);
        }
    }
    out.push(iso);

    out.push(match check_dirac(&m, &p_in_m, cfg) {
        Ok(parts) => merge("bialgebra.lagrangian_subalgebra", &parts),
        Err(e) => Outcome::error("bialgebra.lagrangian_subalgebra", e.to_string()),
    });

    let mut pc = Outcome::new("bialgebra.pairing");
    for (a, x) in img.iter().enumerate() {
        for (i, xi) in p_in_m.iter().enumerate() {
            let r = &m.pair(x, xi) - &db.iota[i][a];
            pc.expect_zero(patch, || format!("e{}, ξ{}", a + 1, i + 1), &[r]);
        }
    }
    out.push(pc);

    let mut span = Outcome::new("bialgebra.span");
    let mut all = img.clone();
    all.extend(p_in_m.iter().cloned());
    let rk = matrix::rank(&all, 2 * k);
    span.expect(
        rk == 2 * k,
        || format!("Φ(g) + p has rank {rk}, m has rank {}", 2 * k),
        Vec::new(),
    );
    out.push(span);

    let mut morph = Outcome::new("bialgebra.phi_morphism");
    for a in 0..gr {
        for b in 0..gr {
            let lhs = matrix::mat_vec(&phi, &db.g.bracket(&ge[a], &ge[b]));
            let rhs = m.bracket(&img[a], &img[b]);
            morph.expect_zero(patch, || format!("e{}, e{}", a + 1, b + 1), &section::sub(&lhs, &rhs));
        }
    }
    out.push(morph);
    out
}

/// The ideal `p° ⊆ g` and the Lie bialgebra `(g/p°, p)`.
pub fn ideal_and_bialgebra_from(db: &DiracBialgebraData) -> (Vec<Sec>, LieBialgebroidData) {
    (db.p_annihilator(), db.lie_bialgebra())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::all_pass;

    fn aff1() -> Vec<Vec<Vec<i64>>> {
        vec![vec![vec![0, 0], vec![0, 1]], vec![vec![0, -1], vec![0, 0]]]
    }

    #[test]
    fn aff1_bialgebra() {
        let db = DiracBialgebraData::new(&aff1(), &[vec![vec![0]]], &[vec![1, 0]]).unwrap();
        let outs = check_dirac_bialgebra(&db, &CheckConfig::default());
        assert!(all_pass(&outs), "{outs:#?}");
        let (ideal, _) = ideal_and_bialgebra_from(&db);
        assert_eq!(ideal, vec![section::basis(2, 1)]);
        assert!(super::super::round_trip(&db.bialgebroid().unwrap()).passed());
    }

    #[test]
    fn non_ideal_mutant() {
        let db = DiracBialgebraData::new(&aff1(), &[vec![vec![0]]], &[vec![0, 1]]).unwrap();
        let outs = check_dirac_bialgebra(&db, &CheckConfig::default());
        let ideal = outs.iter().find(|o| o.name == "bialgebra.ideal").unwrap();
        assert!(!ideal.passed());
        assert!(ideal.witnesses[0].label.contains("∉ p°"));
        assert!(!outs
            .iter()
            .find(|o| o.name == "bialgebra.phi_morphism")
            .unwrap()
            .passed());
    }

    #[test]
    fn abelian_pass() {
        let z = vec![vec![vec![0; 3]; 3]; 3];
        let zp = vec![vec![vec![0; 2]; 2]; 2];
        let db = DiracBialgebraData::new(&z, &zp, &[vec![1, 0, 1], vec![0, 1, 0]]).unwrap();
        assert!(all_pass(&check_dirac_bialgebra(&db, &CheckConfig::default())));
    }

    #[test]
    fn cocycle_detects_incompatible_pair() {
        // q = aff(1) ⊕ ℝ, q* with [ξ₁,ξ₂] = ξ₃ is not a Lie bialgebra
        let patch = point_patch();
        let mut g = vec![vec![vec![0; 3]; 3]; 3];
        g[0][1] = vec![0, 1, 0];
        g[1][0] = vec![0, -1, 0];
        let mut pp = vec![vec![vec![0; 3]; 3]; 3];
        pp[0][1] = vec![0, 0, 1];
        pp[1][0] = vec![0, 0, -1];
        let q = DullAlgebroid::lie_algebra(&patch, &g).unwrap();
        let p = DullAlgebroid::lie_algebra(&patch, &pp).unwrap();
        assert!(!check_bialgebra_cocycle(&q, &p).passed());
        let lb = LieBialgebroidData::new(q, p).unwrap();
        assert!(!all_pass(&check_courant_axioms(
            &courant_double(&lb),
            &CheckConfig::default()
        )));
        let db = DiracBialgebraData::new(&g, &pp, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert!(!all_pass(&check_dirac_bialgebra(&db, &CheckConfig::default())));
    }
}
