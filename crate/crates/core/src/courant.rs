//! Courant and degenerate Courant algebroids on trivial or quotient carriers,
//! axiom certification, Dirac structures, Courant morphisms and the
//! Bott–Dorfman connection of a Dirac structure.

use std::fmt;
use std::sync::Arc;

use crate::algebroid::{lie_checks, DullAlgebroid};
use crate::bundle::matrix::{self, Mat};
use crate::bundle::section::{self, Sec};
use crate::bundle::{complement, Frame, Patch, Subbundle, TrivialBundle};
use crate::cartan::{self, TwoForm};
use crate::check::{verify, Outcome};
use crate::error::{Error, Result};
use crate::sampling::{CheckConfig, Sampler};
use crate::scalar::Scalar;

pub type BracketFn = Arc<dyn Fn(&[Scalar], &[Scalar]) -> Sec + Send + Sync>;

#[derive(Clone)]
pub enum Bracket {
    /// `table[i][j] = ⟦e_i, e_j⟧` on the standard frame of the ambient
    /// bundle, extended to all sections by the Courant–Leibniz rules.
    Table(Vec<Vec<Sec>>),
    /// A closed-form bracket on representatives.
    Formula(BracketFn),
}

impl fmt::Debug for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bracket::Table(t) => f.debug_tuple("Table").field(t).finish(),
            Bracket::Formula(_) => f.write_str("Formula(..)"),
        }
    }
}

/// The quotient of an admissible subbundle `S` of a trivial bundle by a
/// subbundle `G ⊆ S`. Sections are represented by elements of `S`; two
/// representatives agree iff their difference lies in `G`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientBundle {
    pub admissible: Frame,
    pub graph: Frame,
    basis: Vec<Sec>,
    joint: Frame,
}

impl QuotientBundle {
    pub fn new(admissible: Frame, graph: Frame) -> Result<Self> {
        let len = admissible.ambient_rank();
        if graph.ambient_rank() != len {
            return Err(Error::Shape(
                "quotient: graph and admissible frames differ in length".into(),
            ));
        }
        if let Some(i) = graph.vectors().iter().position(|g| !admissible.contains(g)) {
            return Err(Error::Precondition(format!(
                "quotient: graph vector {} is not admissible",
                i + 1
            )));
        }
        // representatives of a basis of S/G, chosen greedily from the S-frame
        let mut current: Vec<Sec> = graph.vectors().to_vec();
        let mut basis = Vec::new();
        for v in admissible.vectors() {
            current.push(v.clone());
            if matrix::rank(&current, len) == current.len() {
                basis.push(v.clone());
            } else {
                current.pop();
            }
        }
        let mut all = basis.clone();
        all.extend(graph.vectors().iter().cloned());
        let joint = Frame::new(all, len)?;
        Ok(QuotientBundle {
            admissible,
            graph,
            basis,
            joint,
        })
    }

    pub fn ambient_len(&self) -> usize {
        self.admissible.ambient_rank()
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Representatives of a frame of the quotient.
    pub fn basis(&self) -> &[Sec] {
        &self.basis
    }

    /// Coordinates of the class of `c` in the quotient frame; `None` when
    /// `c` is not an admissible representative.
    pub fn reduce(&self, c: &[Scalar]) -> Option<Sec> {
        let mut all = self.joint.coords(c)?;
        all.truncate(self.basis.len());
        Some(all)
    }

    pub fn lift(&self, coords: &[Scalar]) -> Sec {
        section::combine(coords, &self.basis, self.ambient_len())
    }

    pub fn is_zero(&self, c: &[Scalar]) -> bool {
        self.reduce(c).is_some_and(|v| section::is_zero(&v))
    }

    pub fn equal(&self, c1: &[Scalar], c2: &[Scalar]) -> bool {
        self.is_zero(&section::sub(c1, c2))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Carrier {
    /// A trivial bundle of the given rank.
    Trivial(usize),
    Quotient(QuotientBundle),
}

/// A (possibly degenerate) Courant algebroid. Anchor, pairing and bracket
/// act on representatives of length `len()`.
#[derive(Clone, Debug)]
pub struct CourantPresentation {
    pub name: String,
    pub patch: Patch,
    pub carrier: Carrier,
    /// `dim × len`.
    pub anchor: Mat,
    /// Symmetric `len × len`.
    pub pairing: Mat,
    /// `d_map[k] = 𝒟(x_k)`, so that `𝒟f = Σ ∂_k f · d_map[k]`.
    pub d_map: Vec<Sec>,
    pub bracket: Bracket,
    pub degenerate: bool,
}

impl CourantPresentation {
    /// Checks shapes, symmetry of the pairing and, unless the presentation
    /// is flagged degenerate, that the Gram determinant does not vanish.
    pub fn validate(&self) -> Result<()> {
        let n = self.patch.dim();
        let l = self.len();
        if self.anchor.len() != n || self.anchor.iter().any(|r| r.len() != l) {
            return Err(Error::Shape(format!("{}: anchor must be {n}×{l}", self.name)));
        }
        if self.pairing.len() != l || self.pairing.iter().any(|r| r.len() != l) {
            return Err(Error::Shape(format!("{}: pairing must be {l}×{l}", self.name)));
        }
        if self.d_map.len() != n || self.d_map.iter().any(|s| s.len() != l) {
            return Err(Error::Shape(format!(
                "{}: 𝒟 needs {n} sections of length {l}",
                self.name
            )));
        }
        if let Bracket::Table(t) = &self.bracket {
            if t.len() != l || t.iter().any(|row| row.len() != l || row.iter().any(|s| s.len() != l)) {
                return Err(Error::Shape(format!("{}: bracket table must be {l}×{l}", self.name)));
            }
        }
        for i in 0..l {
            for j in i + 1..l {
                if self.pairing[i][j] != self.pairing[j][i] {
                    return Err(Error::Precondition(format!(
                        "{}: pairing is not symmetric at ({},{})",
                        self.name,
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        if !self.degenerate && matrix::det(&self.gram()).is_zero() {
            return Err(Error::Precondition(format!("{}: degenerate pairing", self.name)));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.patch.dim()
    }

    /// Length of representatives.
    pub fn len(&self) -> usize {
        match &self.carrier {
            Carrier::Trivial(r) => *r,
            Carrier::Quotient(q) => q.ambient_len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rank() == 0
    }

    /// Fibre rank of the carrier.
    pub fn rank(&self) -> usize {
        match &self.carrier {
            Carrier::Trivial(r) => *r,
            Carrier::Quotient(q) => q.rank(),
        }
    }

    /// Representatives of a frame of the carrier.
    pub fn basis(&self) -> Vec<Sec> {
        match &self.carrier {
            Carrier::Trivial(r) => section::standard_frame(*r),
            Carrier::Quotient(q) => q.basis().to_vec(),
        }
    }

    /// Coordinates of `c` in `basis()`.
    pub fn coords(&self, c: &[Scalar]) -> Option<Sec> {
        match &self.carrier {
            Carrier::Trivial(_) => Some(c.to_vec()),
            Carrier::Quotient(q) => q.reduce(c),
        }
    }

    pub fn lift(&self, coords: &[Scalar]) -> Sec {
        match &self.carrier {
            Carrier::Trivial(_) => coords.to_vec(),
            Carrier::Quotient(q) => q.lift(coords),
        }
    }

    pub fn is_zero(&self, c: &[Scalar]) -> bool {
        match &self.carrier {
            Carrier::Trivial(_) => section::is_zero(c),
            Carrier::Quotient(q) => q.is_zero(c),
        }
    }

    pub fn pair(&self, c1: &[Scalar], c2: &[Scalar]) -> Scalar {
        let g = matrix::mat_vec(&self.pairing, c2);
        section::dot(c1, &g)
    }

    /// Gram matrix of the pairing on `basis()`.
    pub fn gram(&self) -> Mat {
        let b = self.basis();
        b.iter().map(|u| b.iter().map(|v| self.pair(u, v)).collect()).collect()
    }

    pub fn anchor_of(&self, c: &[Scalar]) -> Sec {
        matrix::mat_vec(&self.anchor, c)
    }

    pub fn d(&self, f: &Scalar) -> Sec {
        let mut out = section::zero(self.len());
        for (k, dk) in self.d_map.iter().enumerate() {
            let p = f.derivative(k);
            if !p.is_zero() {
                section::axpy(&mut out, &p, dk);
            }
        }
        out
    }

    pub fn bracket(&self, c1: &[Scalar], c2: &[Scalar]) -> Sec {
        match &self.bracket {
            Bracket::Formula(f) => f(c1, c2),
            Bracket::Table(t) => self.leibniz_extension(t, c1, c2),
        }
    }

    /// `⟦Σf_i e_i, Σg_j e_j⟧ = Σ f_i g_j ⟦e_i,e_j⟧ + Σ_j ρ(c₁)(g_j) e_j
    ///  − Σ_i ρ(c₂)(f_i) e_i + Σ_i ⟨e_i, c₂⟩ 𝒟f_i`.
    fn leibniz_extension(&self, t: &[Vec<Sec>], c1: &[Scalar], c2: &[Scalar]) -> Sec {
        let l = self.len();
        let mut out = section::zero(l);
        for (i, f) in c1.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            for (j, g) in c2.iter().enumerate() {
                if g.is_zero() || section::is_zero(&t[i][j]) {
                    continue;
                }
                section::axpy(&mut out, &(f * g), &t[i][j]);
            }
        }
        let r1 = self.anchor_of(c1);
        let r2 = self.anchor_of(c2);
        let g2 = matrix::mat_vec(&self.pairing, c2);
        for i in 0..l {
            let d = &cartan::apply_vf(&r1, &c2[i]) - &cartan::apply_vf(&r2, &c1[i]);
            if !d.is_zero() {
                out[i] = &out[i] + &d;
            }
            if !c1[i].is_zero() && !g2[i].is_zero() {
                section::axpy(&mut out, &g2[i], &self.d(&c1[i]));
            }
        }
        out
    }

    pub fn with_bracket(mut self, name: impl Into<String>, bracket: Bracket) -> Self {
        self.name = name.into();
        self.bracket = bracket;
        self
    }
}

/// `⟦(X₁,θ₁),(X₂,θ₂)⟧ = ([X₁,X₂], ℒ_{X₁}θ₂ − i_{X₂}dθ₁)` on `TM ⊕ T*M`.
pub fn courant_dorfman(c1: &[Scalar], c2: &[Scalar]) -> Sec {
    let n = c1.len() / 2;
    let (x1, t1) = c1.split_at(n);
    let (x2, t2) = c2.split_at(n);
    let form = section::sub(&cartan::lie_derivative_1form(x1, t2), &cartan::contract_d(x2, t1));
    section::concat(&cartan::lie_bracket_vf(x1, x2), &form)
}

/// `TM ⊕ T*M` with anchor `pr_TM`, pairing `θ(Y) + η(X)` and the
/// Courant–Dorfman bracket, presented by its (vanishing) coordinate table.
pub fn standard_courant(patch: &Patch) -> CourantPresentation {
    let n = patch.dim();
    let l = 2 * n;
    let anchor: Mat = (0..n).map(|k| section::basis(l, k)).collect();
    let pairing: Mat = (0..l)
        .map(|i| section::basis(l, if i < n { i + n } else { i - n }))
        .collect();
    let d_map = (0..n).map(|k| section::basis(l, n + k)).collect();
    let c = CourantPresentation {
        name: "TM+T*M".into(),
        patch: patch.clone(),
        carrier: Carrier::Trivial(l),
        anchor,
        pairing,
        d_map,
        bracket: Bracket::Table(vec![vec![section::zero(l); l]; l]),
        degenerate: false,
    };
    c.validate().expect("standard Courant algebroid is well formed");
    c
}

/// `A ⊕ T*M` with anchor `ρ∘pr_A`, pairing `⟨·,·⟩_d`, bracket `[·,·]_d` and
/// `𝒟f = (0, df)`.
pub fn degenerate_courant(alg: &DullAlgebroid) -> CourantPresentation {
    let n = alg.dim();
    let r = alg.structure.len();
    let l = n + r;
    let anchor: Mat = alg
        .anchor
        .iter()
        .map(|row| section::concat(row, &section::zero(n)))
        .collect();
    let mut pairing = vec![section::zero(l); l];
    for j in 0..r {
        for k in 0..n {
            let v = alg.anchor[k][j].clone();
            pairing[j][r + k] = v.clone();
            pairing[r + k][j] = v;
        }
    }
    let d_map = (0..n).map(|k| section::basis(l, r + k)).collect();
    let a = alg.clone();
    let c = CourantPresentation {
        name: format!("{}+T*M", alg.name),
        patch: alg.patch.clone(),
        carrier: Carrier::Trivial(l),
        anchor,
        pairing,
        d_map,
        bracket: Bracket::Formula(Arc::new(move |t1, t2| a.degenerate_bracket(t1, t2))),
        degenerate: true,
    };
    c.validate().expect("degenerate Courant algebroid is well formed");
    c
}

fn random_tuples(c: &CourantPresentation, cfg: &CheckConfig, name: &str, arity: usize) -> Vec<Vec<Sec>> {
    let basis = c.basis();
    let mut s = Sampler::new(cfg, name, c.dim());
    (0..cfg.trials)
        .map(|_| (0..arity).map(|_| s.in_span(&basis, c.len())).collect())
        .collect()
}

/// Axioms (1)–(3), the derived rules (4)–(5) and the `𝒟` identity, each on
/// frame tuples and seeded random sections.
pub fn check_courant_axioms(c: &CourantPresentation, cfg: &CheckConfig) -> Vec<Outcome> {
    let patch = &c.patch;
    let frame = c.basis();
    let zero = |r: &[Scalar]| c.is_zero(r);

    let mut a1 = Outcome::new("courant.axiom1");
    verify(
        &mut a1,
        patch,
        &frame,
        3,
        &random_tuples(c, cfg, "courant.axiom1", 3),
        |q| {
            let lhs = c.bracket(q[0], &c.bracket(q[1], q[2]));
            let t1 = c.bracket(&c.bracket(q[0], q[1]), q[2]);
            let t2 = c.bracket(q[1], &c.bracket(q[0], q[2]));
            section::sub(&section::sub(&lhs, &t1), &t2)
        },
        zero,
    );

    let mut a2 = Outcome::new("courant.axiom2");
    verify(
        &mut a2,
        patch,
        &frame,
        3,
        &random_tuples(c, cfg, "courant.axiom2", 3),
        |q| {
            let lhs = cartan::apply_vf(&c.anchor_of(q[0]), &c.pair(q[1], q[2]));
            let t1 = c.pair(&c.bracket(q[0], q[1]), q[2]);
            let t2 = c.pair(q[1], &c.bracket(q[0], q[2]));
            vec![&(&lhs - &t1) - &t2]
        },
        section::is_zero,
    );

    let mut a3 = Outcome::new("courant.axiom3");
    verify(
        &mut a3,
        patch,
        &frame,
        2,
        &random_tuples(c, cfg, "courant.axiom3", 2),
        |q| {
            let sym = section::add(&c.bracket(q[0], q[1]), &c.bracket(q[1], q[0]));
            section::sub(&sym, &c.d(&c.pair(q[0], q[1])))
        },
        zero,
    );

    let mut a4 = Outcome::new("courant.axiom4");
    verify(
        &mut a4,
        patch,
        &frame,
        2,
        &random_tuples(c, cfg, "courant.axiom4", 2),
        |q| {
            let lhs = c.anchor_of(&c.bracket(q[0], q[1]));
            section::sub(&lhs, &cartan::lie_bracket_vf(&c.anchor_of(q[0]), &c.anchor_of(q[1])))
        },
        section::is_zero,
    );

    let mut s = Sampler::new(cfg, "courant.axiom5", c.dim());
    let basis = c.basis();
    let randoms: Vec<Vec<Sec>> = (0..cfg.trials)
        .map(|_| vec![s.in_span(&basis, c.len()), s.in_span(&basis, c.len()), vec![s.scalar()]])
        .collect();
    let mut a5 = Outcome::new("courant.axiom5");
    verify(
        &mut a5,
        patch,
        &[],
        3,
        &randoms,
        |q| {
            let f = &q[2][0];
            let mut r = c.bracket(q[0], &section::scale(f, q[1]));
            section::sub_assign(&mut r, &section::scale(f, &c.bracket(q[0], q[1])));
            section::sub_assign(&mut r, &section::scale(&cartan::apply_vf(&c.anchor_of(q[0]), f), q[1]));
            r
        },
        zero,
    );

    let mut s = Sampler::new(cfg, "courant.d", c.dim());
    let randoms: Vec<Vec<Sec>> = (0..cfg.trials)
        .map(|_| vec![vec![s.scalar()], s.in_span(&basis, c.len())])
        .collect();
    let mut dd = Outcome::new("courant.d");
    verify(
        &mut dd,
        patch,
        &[],
        2,
        &randoms,
        |q| {
            let f = &q[0][0];
            vec![&c.pair(&c.d(f), q[1]) - &cartan::apply_vf(&c.anchor_of(q[1]), f)]
        },
        section::is_zero,
    );

    vec![a1, a2, a3, a4, a5, dd]
}

fn d_coords(c: &CourantPresentation, d: &[Sec]) -> Result<Frame> {
    let mut coords = Vec::with_capacity(d.len());
    for (i, v) in d.iter().enumerate() {
        if v.len() != c.len() {
            return Err(Error::Shape(format!(
                "subbundle vector {} has {} components, expected {}",
                i + 1,
                v.len(),
                c.len()
            )));
        }
        coords.push(c.coords(v).ok_or_else(|| {
            Error::Precondition(format!(
                "subbundle vector {} is not an admissible representative",
                i + 1
            ))
        })?);
    }
    Frame::new(coords, c.rank())
}

/// Isotropy and bracket closure of the span of `d`; usable on degenerate
/// carriers.
pub fn check_isotropic_closed(c: &CourantPresentation, d: &[Sec], cfg: &CheckConfig) -> Result<Vec<Outcome>> {
    let dc = d_coords(c, d)?;
    let patch = &c.patch;
    let mut iso = Outcome::new("dirac.isotropic");
    for i in 0..d.len() {
        for j in i..d.len() {
            iso.expect_zero(
                patch,
                || format!("frame ({},{})", i + 1, j + 1),
                &[c.pair(&d[i], &d[j])],
            );
        }
    }

    let mut s = Sampler::new(cfg, "dirac.closed", c.dim());
    let randoms: Vec<Vec<Sec>> = (0..cfg.trials)
        .map(|_| vec![s.in_span(d, c.len()), s.in_span(d, c.len())])
        .collect();
    let mut closed = Outcome::new("dirac.closed");
    verify(
        &mut closed,
        patch,
        d,
        2,
        &randoms,
        |q| {
            let b = c.bracket(q[0], q[1]);
            match c.coords(&b) {
                // a covector on the carrier that kills D and detects the bracket
                Some(x) => match crate::bundle::membership(&x, &dc) {
                    crate::bundle::Membership::Member(_) => Vec::new(),
                    crate::bundle::Membership::NotMember(w) => vec![section::dot(&w, &x)],
                },
                None => b,
            }
        },
        section::is_zero,
    );
    Ok(vec![iso, closed])
}

/// Dirac structure test: half rank, isotropy, `D^⊥ ⊆ D`, bracket closure, and
/// the Lie algebroid axioms of the restricted bracket.
pub fn check_dirac(c: &CourantPresentation, d: &[Sec], cfg: &CheckConfig) -> Result<Vec<Outcome>> {
    if c.degenerate {
        return Err(Error::Precondition(format!(
            "{}: Dirac structures need a nondegenerate pairing",
            c.name
        )));
    }
    if c.rank() % 2 != 0 {
        return Err(Error::Precondition(format!(
            "{}: odd carrier rank {}",
            c.name,
            c.rank()
        )));
    }
    let dc = d_coords(c, d)?;
    let mut rank = Outcome::new("dirac.rank");
    rank.expect(
        2 * dc.rank() == c.rank(),
        || format!("rank {} in a carrier of rank {}", dc.rank(), c.rank()),
        Vec::new(),
    );

    // D^⊥ = {x : ⟨d_i, x⟩ = 0}, computed in carrier coordinates
    let gram = c.gram();
    let rows: Vec<Sec> = dc.vectors().iter().map(|v| matrix::mat_vec(&gram, v)).collect();
    let perp = matrix::nullspace(&rows, c.rank());
    let mut lag = Outcome::new("dirac.lagrangian");
    for (k, x) in perp.iter().enumerate() {
        if let crate::bundle::Membership::NotMember(w) = crate::bundle::membership(x, &dc) {
            lag.fail(
                format!("D^⊥ vector {}", k + 1),
                c.patch.show_all(&[section::dot(&w, x)]),
            );
        }
    }

    let mut out = vec![rank];
    let ic = check_isotropic_closed(c, d, cfg)?;
    let closed = ic[1].passed();
    out.push(ic[0].clone());
    out.push(lag);
    out.push(ic[1].clone());
    if closed {
        let alg = restricted_algebroid(c, d)?;
        out.extend(lie_checks(&alg, cfg, "dirac.restricted"));
    }
    Ok(out)
}

/// The bracket and anchor of `C` restricted to the span of `d`, in the frame
/// `d`.
pub fn restricted_algebroid(c: &CourantPresentation, d: &[Sec]) -> Result<DullAlgebroid> {
    let dc = d_coords(c, d)?;
    let k = d.len();
    let mut structure = vec![vec![section::zero(k); k]; k];
    for i in 0..k {
        for j in 0..k {
            let b = c.bracket(&d[i], &d[j]);
            structure[i][j] = c.coords(&b).and_then(|x| dc.coords(&x)).ok_or_else(|| {
                Error::Precondition(format!("bracket of frame ({},{}) leaves the subbundle", i + 1, j + 1))
            })?;
        }
    }
    let anchor: Mat = (0..c.dim())
        .map(|row| d.iter().map(|v| c.anchor_of(v)[row].clone()).collect())
        .collect();
    DullAlgebroid::new(format!("D in {}", c.name), &c.patch, anchor, structure)
}

fn pair_bundle(patch: &Patch) -> TrivialBundle {
    TrivialBundle::new("TM+T*M", patch, 2 * patch.dim())
}

/// `graph(π^♯) = {(π^♯ξ, ξ)}` with `π^♯(dx^j) = Σ_i π^{ji} ∂_i`.
pub fn dirac_from_poisson(patch: &Patch, pi: &TwoForm) -> Result<Subbundle> {
    let n = patch.dim();
    if pi.len() != n || pi.iter().any(|r| r.len() != n) {
        return Err(Error::Shape(format!("bivector must be {n}×{n}")));
    }
    let vectors = (0..n).map(|j| section::concat(&pi[j], &section::basis(n, j))).collect();
    Subbundle::new(pair_bundle(patch), vectors)
}

/// `graph(ω^♭) = {(X, i_X ω)}`.
pub fn dirac_from_2form(patch: &Patch, omega: &TwoForm) -> Result<Subbundle> {
    let n = patch.dim();
    if omega.len() != n || omega.iter().any(|r| r.len() != n) {
        return Err(Error::Shape(format!("2-form must be {n}×{n}")));
    }
    let vectors = (0..n)
        .map(|i| section::concat(&section::basis(n, i), &omega[i]))
        .collect();
    Subbundle::new(pair_bundle(patch), vectors)
}

/// `F ⊕ F°` for a subbundle `F ⊆ TM`.
pub fn dirac_from_foliation(patch: &Patch, f: &Frame) -> Result<Subbundle> {
    let n = patch.dim();
    if f.ambient_rank() != n {
        return Err(Error::Shape("foliation frame must live in TM".into()));
    }
    let mut vectors: Vec<Sec> = f
        .vectors()
        .iter()
        .map(|x| section::concat(x, &section::zero(n)))
        .collect();
    for xi in f.annihilating_covectors() {
        vectors.push(section::concat(&section::zero(n), &xi));
    }
    Subbundle::new(pair_bundle(patch), vectors)
}

/// `Φ: C₁ → C₂` given on representatives by a `len₂ × len₁` matrix: anchors,
/// pairings and brackets are preserved. For a quotient source, `Φ` must also
/// kill the graph.
pub fn check_courant_morphism(
    phi: &Mat,
    c1: &CourantPresentation,
    c2: &CourantPresentation,
    cfg: &CheckConfig,
) -> Result<Vec<Outcome>> {
    if c1.patch != c2.patch {
        return Err(Error::PatchMismatch(
            "Courant morphism between different patches".into(),
        ));
    }
    if phi.len() != c2.len() || phi.iter().any(|r| r.len() != c1.len()) {
        return Err(Error::Shape(format!("morphism must be {}×{}", c2.len(), c1.len())));
    }
    let patch = &c1.patch;
    let frame = c1.basis();
    let map = |c: &[Scalar]| matrix::mat_vec(phi, c);

    let mut anchor = Outcome::new("morphism.anchor");
    for (i, v) in frame.iter().enumerate() {
        let r = section::sub(&c2.anchor_of(&map(v)), &c1.anchor_of(v));
        anchor.expect_zero(patch, || format!("frame ({})", i + 1), &r);
    }

    let mut pairing = Outcome::new("morphism.pairing");
    for i in 0..frame.len() {
        for j in i..frame.len() {
            let r = &c2.pair(&map(&frame[i]), &map(&frame[j])) - &c1.pair(&frame[i], &frame[j]);
            pairing.expect_zero(patch, || format!("frame ({},{})", i + 1, j + 1), &[r]);
        }
    }

    let mut bracket = Outcome::new("morphism.bracket");
    verify(
        &mut bracket,
        patch,
        &frame,
        2,
        &random_tuples(c1, cfg, "morphism.bracket", 2),
        |q| {
            let lhs = map(&c1.bracket(q[0], q[1]));
            section::sub(&lhs, &c2.bracket(&map(q[0]), &map(q[1])))
        },
        |r| c2.is_zero(r),
    );

    let mut out = vec![anchor, pairing, bracket];
    if let Carrier::Quotient(q) = &c1.carrier {
        let mut wd = Outcome::new("morphism.well_defined");
        for (i, g) in q.graph.vectors().iter().enumerate() {
            let image = map(g);
            if !c2.is_zero(&image) {
                wd.fail(format!("graph vector {}", i + 1), patch.show_all(&image));
            }
        }
        out.push(wd);
    }
    Ok(out)
}

/// The Bott–Dorfman connection `Δ^D_d c̄ = class of ⟦d, c⟧` of a Dirac
/// structure `D`, on `C/D` presented by a complement `W`.
#[derive(Clone, Debug)]
pub struct BottDorfman {
    pub courant: CourantPresentation,
    pub d: Vec<Sec>,
    /// Representatives of a frame of `C/D`.
    pub w: Vec<Sec>,
    /// `table[i][k]` = coordinates in `w` of `Δ^D_{d_i} w̄_k`.
    pub table: Vec<Vec<Sec>>,
    joint: Frame,
}

impl BottDorfman {
    /// Coordinates in `w` of the class of `c` modulo `D`.
    pub fn class(&self, c: &[Scalar]) -> Option<Sec> {
        let x = self.courant.coords(c)?;
        let mut all = self.joint.coords(&x)?;
        Some(all.split_off(self.d.len()))
    }

    /// `Δ^D_d c̄` for a section `d` of `D` and a representative `c`.
    pub fn eval(&self, d: &[Scalar], c: &[Scalar]) -> Option<Sec> {
        self.class(&self.courant.bracket(d, c))
    }
}

/// Builds the Bott–Dorfman table and checks well-definedness: replacing `c`
/// by `c + d'` with `d' ∈ Γ(D)` leaves the class unchanged.
pub fn bott_dorfman(c: &CourantPresentation, d: &[Sec], cfg: &CheckConfig) -> Result<(BottDorfman, Outcome)> {
    let dc = d_coords(c, d)?;
    let wc = complement(&dc);
    let w: Vec<Sec> = wc.vectors().iter().map(|x| c.lift(x)).collect();
    let mut all = dc.vectors().to_vec();
    all.extend(wc.vectors().iter().cloned());
    let joint = Frame::new(all, c.rank())?;
    let mut bd = BottDorfman {
        courant: c.clone(),
        d: d.to_vec(),
        w,
        table: Vec::new(),
        joint,
    };
    let mut table = vec![vec![Vec::new(); bd.w.len()]; d.len()];
    for (i, di) in d.iter().enumerate() {
        for (k, wk) in bd.w.iter().enumerate() {
            table[i][k] = bd
                .eval(di, wk)
                .ok_or_else(|| Error::Precondition("bracket leaves the admissible representatives".into()))?;
        }
    }
    bd.table = table;

    let mut s = Sampler::new(cfg, "bott.well_defined", c.dim());
    let randoms: Vec<Vec<Sec>> = (0..cfg.trials)
        .map(|_| vec![s.in_span(d, c.len()), s.in_span(d, c.len())])
        .collect();
    let mut wd = Outcome::new("bott.well_defined");
    let wdim = bd.w.len();
    verify(
        &mut wd,
        &c.patch,
        d,
        2,
        &randoms,
        |q| match bd.eval(q[0], q[1]) {
            Some(x) => x,
            None => vec![Scalar::one(); wdim.max(1)],
        },
        section::is_zero,
    );
    Ok((bd, wd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::all_pass;

    fn p2() -> Patch {
        Patch::standard(2)
    }
    fn v(p: &Patch, xs: &[&str]) -> Sec {
        xs.iter().map(|s| p.parse(s).unwrap()).collect()
    }
    fn form(p: &Patch, rows: &[&[&str]]) -> TwoForm {
        rows.iter().map(|r| v(p, r)).collect()
    }

    #[test]
    fn standard_bracket_examples() {
        let p = p2();
        let c = standard_courant(&p);
        let b = c.bracket(&v(&p, &["0", "x", "0", "0"]), &v(&p, &["1", "0", "0", "1"]));
        assert_eq!(b, v(&p, &["0", "-1", "1", "0"]));
        assert_eq!(
            b,
            courant_dorfman(&v(&p, &["0", "x", "0", "0"]), &v(&p, &["1", "0", "0", "1"]))
        );
        assert!(section::is_zero(
            &c.bracket(&v(&p, &["1", "0", "0", "0"]), &v(&p, &["0", "1", "0", "0"]))
        ));
        assert!(c
            .pair(&v(&p, &["1", "0", "0", "0"]), &v(&p, &["0", "0", "1", "0"]))
            .is_one());
    }

    #[test]
    fn standard_axioms_and_negative_control() {
        let p = p2();
        let cfg = CheckConfig::default();
        let c = standard_courant(&p);
        assert!(all_pass(&check_courant_axioms(&c, &cfg)));
        let dropped = c.clone().with_bracket(
            "dropped",
            Bracket::Formula(Arc::new(|c1, c2| {
                let n = c1.len() / 2;
                let form = cartan::lie_derivative_1form(&c1[..n], &c2[n..]);
                section::concat(&cartan::lie_bracket_vf(&c1[..n], &c2[..n]), &form)
            })),
        );
        let outs = check_courant_axioms(&dropped, &cfg);
        // ℒ_{X₁} is a derivation of the pairing and i_{X₂}dθ₁ pairs to zero
        // against the symmetrization, so only the symmetry axiom notices
        let find = |n: &str| outs.iter().find(|o| o.name == n).unwrap();
        assert!(find("courant.axiom2").passed());
        assert!(find("courant.axiom1").passed());
        let a3 = find("courant.axiom3");
        assert!(!a3.passed());
        assert!(!a3.witnesses.is_empty());
    }

    #[test]
    fn degenerate_tangent_matches_standard() {
        let p = p2();
        let c = degenerate_courant(&DullAlgebroid::tangent(&p));
        let s = standard_courant(&p);
        let c1 = v(&p, &["x*y", "1", "y^2", "x"]);
        let c2 = v(&p, &["y", "x^2", "1", "x*y"]);
        assert_eq!(c.bracket(&c1, &c2), s.bracket(&c1, &c2));
        assert!(all_pass(&check_courant_axioms(&c, &CheckConfig::default())));
    }

    #[test]
    fn classical_dirac_structures() {
        let p = p2();
        let c = standard_courant(&p);
        let cfg = CheckConfig::default();
        let pi = form(&p, &[&["0", "x"], &["-x", "0"]]);
        let dp = dirac_from_poisson(&p, &pi).unwrap();
        assert_eq!(dp.vectors()[0], v(&p, &["0", "x", "1", "0"]));
        assert!(all_pass(&check_dirac(&c, dp.vectors(), &cfg).unwrap()));
        let om = form(&p, &[&["0", "1"], &["-1", "0"]]);
        let dw = dirac_from_2form(&p, &om).unwrap();
        assert!(all_pass(&check_dirac(&c, dw.vectors(), &cfg).unwrap()));
        let f = Frame::new(vec![v(&p, &["1", "0"])], 2).unwrap();
        let df = dirac_from_foliation(&p, &f).unwrap();
        assert!(all_pass(&check_dirac(&c, df.vectors(), &cfg).unwrap()));
    }

    #[test]
    fn nonclosed_form_fails_closure() {
        let p = Patch::standard(3);
        let c = standard_courant(&p);
        let om = form(&p, &[&["0", "z", "0"], &["-z", "0", "0"], &["0", "0", "0"]]);
        let d = dirac_from_2form(&p, &om).unwrap();
        let outs = check_dirac(&c, d.vectors(), &CheckConfig::default()).unwrap();
        let closed = outs.iter().find(|o| o.name == "dirac.closed").unwrap();
        assert!(!closed.passed());
        assert!(outs.iter().find(|o| o.name == "dirac.isotropic").unwrap().passed());
    }

    #[test]
    fn identity_morphism_and_bott_dorfman() {
        let p = p2();
        let c = standard_courant(&p);
        let cfg = CheckConfig::default();
        let id: Mat = section::standard_frame(4);
        assert!(all_pass(&check_courant_morphism(&id, &c, &c, &cfg).unwrap()));
        // D = TM ⊕ 0: Δ^D_X θ̄ = class of ℒ_X θ
        let d = vec![v(&p, &["1", "0", "0", "0"]), v(&p, &["0", "1", "0", "0"])];
        let (bd, wd) = bott_dorfman(&c, &d, &cfg).unwrap();
        assert!(wd.passed());
        let x = v(&p, &["y", "x", "0", "0"]);
        let theta = v(&p, &["0", "0", "x*y", "0"]);
        let lie = cartan::lie_derivative_1form(&x[..2], &theta[2..]);
        let expect = bd
            .class(&section::concat(&[Scalar::zero(), Scalar::zero()], &lie))
            .unwrap();
        assert_eq!(bd.eval(&x, &theta).unwrap(), expect);
    }
}
