//! Anchored bundles, dull and Lie algebroids given by frame structure
//! functions, Lie derivatives on `A ⊕ T*M` and `TM ⊕ A*`, and linear
//! connections with their basic connections.

use crate::bundle::matrix::{self, Mat};
use crate::bundle::section::{self, Sec};
use crate::bundle::{Layout, Patch};
use crate::cartan;
use crate::check::{verify, Outcome};
use crate::error::{Error, Result};
use crate::sampling::{CheckConfig, Sampler};
use crate::scalar::Scalar;

/// Anything with an anchor and a bracket on its sections, evaluated on
/// component vectors in some fixed frame.
pub trait DullBracket: Sync {
    fn patch(&self) -> &Patch;
    fn rank(&self) -> usize;
    fn anchor_of(&self, q: &[Scalar]) -> Sec;
    fn bracket(&self, q1: &[Scalar], q2: &[Scalar]) -> Sec;

    /// Whether a section is zero; quotient presentations override this.
    fn is_zero_section(&self, q: &[Scalar]) -> bool {
        section::is_zero(q)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Certified {
    pub skew: bool,
    pub anchor: bool,
    pub jacobi: bool,
}

/// Anchored bundle with a bracket given by frame structure functions and
/// extended to all sections by the Leibniz rule in both slots.
#[derive(Clone, Debug, PartialEq)]
pub struct DullAlgebroid {
    pub name: String,
    pub patch: Patch,
    /// `dim × rank`; column `j` is `ρ(e_j)`.
    pub anchor: Mat,
    /// `structure[i][j] = [e_i, e_j]`.
    pub structure: Vec<Vec<Sec>>,
    certified: Certified,
}

impl DullAlgebroid {
    pub fn new(name: impl Into<String>, patch: &Patch, anchor: Mat, structure: Vec<Vec<Sec>>) -> Result<Self> {
        let n = patch.dim();
        let r = structure.len();
        if anchor.len() != n || anchor.iter().any(|row| row.len() != r) {
            return Err(Error::Shape(format!(
                "anchor must be {n}×{r}, structure functions have rank {r}"
            )));
        }
        if structure
            .iter()
            .any(|row| row.len() != r || row.iter().any(|s| s.len() != r))
        {
            return Err(Error::Shape("structure functions must be rank×rank sections".into()));
        }
        Ok(DullAlgebroid {
            name: name.into(),
            patch: patch.clone(),
            anchor,
            structure,
            certified: Certified::default(),
        })
    }

    /// `A = TM`, identity anchor, vanishing structure functions.
    pub fn tangent(patch: &Patch) -> Self {
        let n = patch.dim();
        let anchor = (0..n).map(|i| section::basis(n, i)).collect();
        let structure = vec![vec![section::zero(n); n]; n];
        DullAlgebroid::new("TM", patch, anchor, structure).unwrap()
    }

    /// Zero anchor and bracket.
    pub fn abelian(patch: &Patch, rank: usize) -> Self {
        let anchor = vec![section::zero(rank); patch.dim()];
        let structure = vec![vec![section::zero(rank); rank]; rank];
        DullAlgebroid::new("abelian", patch, anchor, structure).unwrap()
    }

    /// A Lie algebra as an algebroid with zero anchor; `c[i][j]` are the
    /// constant structure coefficients of `[e_i, e_j]`.
    pub fn lie_algebra(patch: &Patch, c: &[Vec<Vec<i64>>]) -> Result<Self> {
        let r = c.len();
        let structure = c
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| v.iter().map(|&k| Scalar::from_int(k)).collect())
                    .collect()
            })
            .collect();
        DullAlgebroid::new("g", patch, vec![section::zero(r); patch.dim()], structure)
    }

    pub fn dim(&self) -> usize {
        self.patch.dim()
    }

    pub fn layout(&self) -> Layout {
        Layout::new(self.dim(), self.rank())
    }

    pub fn certified(&self) -> Certified {
        self.certified
    }

    pub fn is_lie(&self) -> bool {
        let c = self.certified;
        c.skew && c.anchor && c.jacobi
    }

    /// Runs the three Lie algebroid checks and records the results.
    pub fn certify(&mut self, cfg: &CheckConfig) -> Vec<Outcome> {
        let skew = check_skew(self, cfg);
        let anchor = check_anchor_compat(self, cfg);
        let jacobi = check_jacobi(self, cfg);
        self.certified = Certified {
            skew: skew.passed(),
            anchor: anchor.passed(),
            jacobi: jacobi.passed(),
        };
        vec![skew, anchor, jacobi]
    }

    pub fn anchor_col(&self, j: usize) -> Sec {
        self.anchor.iter().map(|row| row[j].clone()).collect()
    }

    /// `ρ^t θ`, i.e. `(ρ^tθ)_j = θ(ρ(e_j))`.
    pub fn rho_t(&self, theta: &[Scalar]) -> Sec {
        (0..self.rank())
            .map(|j| {
                theta
                    .iter()
                    .zip(&self.anchor)
                    .filter(|(t, row)| !t.is_zero() && !row[j].is_zero())
                    .map(|(t, row)| t * &row[j])
                    .sum()
            })
            .collect()
    }

    /// `(a, θ) ↦ (ρ(a), ρ^t θ)`.
    pub fn rho_rhot(&self, t: &[Scalar]) -> Sec {
        let l = self.layout();
        let (a, theta) = l.core_parts(t);
        l.side(&self.anchor_of(a), &self.rho_t(theta))
    }

    /// `⟨ℒ_a α, b⟩ = ρ(a)⟨α,b⟩ − ⟨α,[a,b]⟩`.
    pub fn lie_derivative_dual(&self, a: &[Scalar], alpha: &[Scalar]) -> Sec {
        let ra = self.anchor_of(a);
        (0..self.rank())
            .map(|j| {
                let e = section::basis(self.rank(), j);
                let br = self.bracket(a, &e);
                &cartan::apply_vf(&ra, &alpha[j]) - &section::dot(alpha, &br)
            })
            .collect()
    }

    /// `i_b d_A α` as a section of `A*`:
    /// `(d_Aα)(b, e_j) = ρ(b)α_j − ρ(e_j)α(b) − α([b, e_j])`.
    pub fn contract_d(&self, b: &[Scalar], alpha: &[Scalar]) -> Sec {
        let rb = self.anchor_of(b);
        let ab = section::dot(alpha, b);
        (0..self.rank())
            .map(|j| {
                let e = section::basis(self.rank(), j);
                let br = self.bracket(b, &e);
                let t1 = cartan::apply_vf(&rb, &alpha[j]);
                let t2 = cartan::apply_vf(&self.anchor_col(j), &ab);
                &(&t1 - &t2) - &section::dot(alpha, &br)
            })
            .collect()
    }

    /// `ℒ_a(a', θ) = ([a,a'], ℒ_{ρ(a)}θ)`.
    pub fn lie_derivative_core(&self, a: &[Scalar], t: &[Scalar]) -> Sec {
        let l = self.layout();
        let (a2, theta) = l.core_parts(t);
        let ra = self.anchor_of(a);
        l.core(&self.bracket(a, a2), &cartan::lie_derivative_1form(&ra, theta))
    }

    /// `ℒ_a(X, α) = ([ρ(a), X], ℒ_a α)`.
    pub fn lie_derivative_side(&self, a: &[Scalar], v: &[Scalar]) -> Sec {
        let l = self.layout();
        let (x, alpha) = l.side_parts(v);
        let ra = self.anchor_of(a);
        l.side(&cartan::lie_bracket_vf(&ra, x), &self.lie_derivative_dual(a, alpha))
    }

    /// `[(a₁,θ₁),(a₂,θ₂)]_d = ([a₁,a₂], ℒ_{ρ(a₁)}θ₂ − i_{ρ(a₂)}dθ₁)`.
    pub fn degenerate_bracket(&self, t1: &[Scalar], t2: &[Scalar]) -> Sec {
        let l = self.layout();
        let (a1, th1) = l.core_parts(t1);
        let (a2, th2) = l.core_parts(t2);
        let r1 = self.anchor_of(a1);
        let r2 = self.anchor_of(a2);
        let form = section::sub(&cartan::lie_derivative_1form(&r1, th2), &cartan::contract_d(&r2, th1));
        l.core(&self.bracket(a1, a2), &form)
    }

    /// `⟨(a₁,θ₁),(a₂,θ₂)⟩_d = θ₂(ρa₁) + θ₁(ρa₂)`.
    pub fn degenerate_pairing(&self, t1: &[Scalar], t2: &[Scalar]) -> Scalar {
        let l = self.layout();
        let (a1, th1) = l.core_parts(t1);
        let (a2, th2) = l.core_parts(t2);
        &section::dot(th2, &self.anchor_of(a1)) + &section::dot(th1, &self.anchor_of(a2))
    }
}

impl DullBracket for DullAlgebroid {
    fn patch(&self) -> &Patch {
        &self.patch
    }

    fn rank(&self) -> usize {
        self.structure.len()
    }

    fn anchor_of(&self, q: &[Scalar]) -> Sec {
        matrix::mat_vec(&self.anchor, q)
    }

    /// `[Σf_i e_i, Σg_j e_j] = Σ f_i g_j c_ij + Σ_j ρ(q₁)(g_j) e_j − Σ_i ρ(q₂)(f_i) e_i`.
    fn bracket(&self, q1: &[Scalar], q2: &[Scalar]) -> Sec {
        let r = self.rank();
        let mut out = section::zero(r);
        for (i, f) in q1.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            for (j, g) in q2.iter().enumerate() {
                if g.is_zero() || section::is_zero(&self.structure[i][j]) {
                    continue;
                }
                section::axpy(&mut out, &(f * g), &self.structure[i][j]);
            }
        }
        let r1 = self.anchor_of(q1);
        let r2 = self.anchor_of(q2);
        for j in 0..r {
            let d = &cartan::apply_vf(&r1, &q2[j]) - &cartan::apply_vf(&r2, &q1[j]);
            if !d.is_zero() {
                out[j] = &out[j] + &d;
            }
        }
        out
    }
}

fn samples<B: DullBracket + ?Sized>(alg: &B, cfg: &CheckConfig, name: &str, arity: usize) -> Vec<Vec<Sec>> {
    let mut s = Sampler::new(cfg, name, alg.patch().dim());
    (0..cfg.trials)
        .map(|_| (0..arity).map(|_| s.section(alg.rank())).collect())
        .collect()
}

/// `[q₁,q₂] + [q₂,q₁] = 0`.
pub fn check_skew<B: DullBracket + ?Sized>(alg: &B, cfg: &CheckConfig) -> Outcome {
    let mut out = Outcome::new("skew");
    let frame = section::standard_frame(alg.rank());
    let randoms = samples(alg, cfg, "skew", 2);
    verify(
        &mut out,
        alg.patch(),
        &frame,
        2,
        &randoms,
        |q| section::add(&alg.bracket(q[0], q[1]), &alg.bracket(q[1], q[0])),
        |r| alg.is_zero_section(r),
    );
    out
}

/// `ρ[q₁,q₂] = [ρq₁, ρq₂]`.
pub fn check_anchor_compat<B: DullBracket + ?Sized>(alg: &B, cfg: &CheckConfig) -> Outcome {
    let mut out = Outcome::new("anchor");
    let frame = section::standard_frame(alg.rank());
    let randoms = samples(alg, cfg, "anchor", 2);
    verify(
        &mut out,
        alg.patch(),
        &frame,
        2,
        &randoms,
        |q| {
            let lhs = alg.anchor_of(&alg.bracket(q[0], q[1]));
            let rhs = cartan::lie_bracket_vf(&alg.anchor_of(q[0]), &alg.anchor_of(q[1]));
            section::sub(&lhs, &rhs)
        },
        section::is_zero,
    );
    out
}

/// `[q₁,[q₂,q₃]] − [[q₁,q₂],q₃] − [q₂,[q₁,q₃]] = 0`.
pub fn check_jacobi<B: DullBracket + ?Sized>(alg: &B, cfg: &CheckConfig) -> Outcome {
    let mut out = Outcome::new("jacobi");
    let frame = section::standard_frame(alg.rank());
    let randoms = samples(alg, cfg, "jacobi", 3);
    verify(
        &mut out,
        alg.patch(),
        &frame,
        3,
        &randoms,
        |q| jacobiator(alg, q[0], q[1], q[2]),
        |r| alg.is_zero_section(r),
    );
    out
}

pub fn jacobiator<B: DullBracket + ?Sized>(alg: &B, a: &[Scalar], b: &[Scalar], c: &[Scalar]) -> Sec {
    let t1 = alg.bracket(a, &alg.bracket(b, c));
    let t2 = alg.bracket(&alg.bracket(a, b), c);
    let t3 = alg.bracket(b, &alg.bracket(a, c));
    section::sub(&section::sub(&t1, &t2), &t3)
}

/// Runs skew, anchor and Jacobi checks, prefixing names.
pub fn lie_checks<B: DullBracket + ?Sized>(alg: &B, cfg: &CheckConfig, prefix: &str) -> Vec<Outcome> {
    let mut v = vec![
        check_skew(alg, cfg),
        check_anchor_compat(alg, cfg),
        check_jacobi(alg, cfg),
    ];
    for o in &mut v {
        o.name = format!("{prefix}.{}", o.name);
    }
    v
}

/// Collapses several outcomes into one named outcome.
pub fn merge(name: impl Into<String>, parts: &[Outcome]) -> Outcome {
    let mut out = Outcome::new(name);
    for p in parts {
        out.absorb(p);
    }
    out
}

/// `∇_{∂_i} e_j = Σ_k Γ^k_{ij} e_k`, stored as `gamma[i][j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearConnection {
    pub rank: usize,
    pub gamma: Vec<Vec<Sec>>,
}

impl LinearConnection {
    pub fn new(dim: usize, rank: usize, gamma: Vec<Vec<Sec>>) -> Result<Self> {
        if gamma.len() != dim
            || gamma
                .iter()
                .any(|row| row.len() != rank || row.iter().any(|s| s.len() != rank))
        {
            return Err(Error::Shape(format!(
                "Christoffel table must be {dim}×{rank} sections of rank {rank}"
            )));
        }
        Ok(LinearConnection { rank, gamma })
    }

    pub fn trivial(dim: usize, rank: usize) -> Self {
        LinearConnection {
            rank,
            gamma: vec![vec![section::zero(rank); rank]; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    /// `∇_X a = Σ_i X^i ∂_i a + Σ_{ij} X^i a_j Γ_{ij}`.
    pub fn covariant(&self, x: &[Scalar], a: &[Scalar]) -> Sec {
        let mut out: Sec = a.iter().map(|aj| cartan::apply_vf(x, aj)).collect();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, aj) in a.iter().enumerate() {
                if aj.is_zero() || section::is_zero(&self.gamma[i][j]) {
                    continue;
                }
                section::axpy(&mut out, &(xi * aj), &self.gamma[i][j]);
            }
        }
        out
    }

    /// Dual connection: `⟨∇*_Y β, a⟩ = Y⟨β,a⟩ − ⟨β, ∇_Y a⟩`.
    pub fn dual_covariant(&self, y: &[Scalar], beta: &[Scalar]) -> Sec {
        (0..self.rank)
            .map(|j| {
                let e = section::basis(self.rank, j);
                &cartan::apply_vf(y, &beta[j]) - &section::dot(beta, &self.covariant(y, &e))
            })
            .collect()
    }

    /// `R(X,Y)a = ∇_X∇_Y a − ∇_Y∇_X a − ∇_{[X,Y]} a`.
    pub fn curvature(&self, x: &[Scalar], y: &[Scalar], a: &[Scalar]) -> Sec {
        let t1 = self.covariant(x, &self.covariant(y, a));
        let t2 = self.covariant(y, &self.covariant(x, a));
        let t3 = self.covariant(&cartan::lie_bracket_vf(x, y), a);
        section::sub(&section::sub(&t1, &t2), &t3)
    }
}

/// The basic connections and basic curvature of a linear connection on `A`.
pub struct BasicConnections<'a> {
    pub alg: &'a DullAlgebroid,
    pub conn: &'a LinearConnection,
}

impl BasicConnections<'_> {
    /// `∇^bas_a a' = [a,a'] + ∇_{ρ(a')} a`.
    pub fn on_a(&self, a: &[Scalar], a2: &[Scalar]) -> Sec {
        section::add(
            &self.alg.bracket(a, a2),
            &self.conn.covariant(&self.alg.anchor_of(a2), a),
        )
    }

    /// `∇^bas_a X = [ρ(a), X] + ρ(∇_X a)`.
    pub fn on_tm(&self, a: &[Scalar], x: &[Scalar]) -> Sec {
        section::add(
            &cartan::lie_bracket_vf(&self.alg.anchor_of(a), x),
            &self.alg.anchor_of(&self.conn.covariant(x, a)),
        )
    }

    /// `R^bas(a₁,a₂)X = −∇_X[a₁,a₂] + [∇_X a₁, a₂] + [a₁, ∇_X a₂]
    ///  + ∇_{∇^bas_{a₂}X} a₁ − ∇_{∇^bas_{a₁}X} a₂`.
    pub fn curvature(&self, a1: &[Scalar], a2: &[Scalar], x: &[Scalar]) -> Sec {
        let c = self.conn;
        let alg = self.alg;
        let mut out = section::neg(&c.covariant(x, &alg.bracket(a1, a2)));
        section::add_assign(&mut out, &alg.bracket(&c.covariant(x, a1), a2));
        section::add_assign(&mut out, &alg.bracket(a1, &c.covariant(x, a2)));
        section::add_assign(&mut out, &c.covariant(&self.on_tm(a2, x), a1));
        section::sub_assign(&mut out, &c.covariant(&self.on_tm(a1, x), a2));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Patch {
        Patch::standard(2)
    }
    fn e(s: &str) -> Scalar {
        p().parse(s).unwrap()
    }
    fn v(a: &str, b: &str) -> Sec {
        vec![e(a), e(b)]
    }

    #[test]
    fn tangent_bracket_is_vector_field_bracket() {
        let tm = DullAlgebroid::tangent(&p());
        assert_eq!(tm.bracket(&v("0", "x"), &v("1", "0")), v("0", "-1"));
    }

    #[test]
    fn tangent_is_lie() {
        let mut tm = DullAlgebroid::tangent(&p());
        let cfg = CheckConfig::default();
        assert!(tm.certify(&cfg).iter().all(Outcome::passed));
        assert!(tm.is_lie());
    }

    #[test]
    fn altered_tangent_fails_anchor() {
        let mut tm = DullAlgebroid::tangent(&p());
        tm.structure[0][1] = v("1", "0");
        tm.structure[1][0] = v("-1", "0");
        let o = check_anchor_compat(&tm, &CheckConfig::default());
        assert!(!o.passed());
        assert_eq!(o.witnesses[0].residual, vec!["1".to_string(), "0".into()]);
    }

    #[test]
    fn aff1_is_lie_and_y_structure_is_not() {
        let pt = Patch::standard(1);
        let mut g =
            DullAlgebroid::lie_algebra(&pt, &[vec![vec![0, 0], vec![0, 1]], vec![vec![0, -1], vec![0, 0]]]).unwrap();
        assert!(g.certify(&CheckConfig::default()).iter().all(Outcome::passed));

        // c^1_{12} = y; the anchor sends e3 to ∂y so the y-dependence is seen
        let z = section::zero(3);
        let mut st = vec![vec![z.clone(); 3]; 3];
        st[0][1] = vec![e("y"), e("0"), e("0")];
        st[1][0] = vec![e("-y"), e("0"), e("0")];
        let anchor = vec![vec![e("0"), e("0"), e("0")], vec![e("0"), e("0"), e("1")]];
        let a = DullAlgebroid::new("bad", &p(), anchor, st).unwrap();
        let cfg = CheckConfig::default();
        assert!(check_skew(&a, &cfg).passed());
        assert!(check_anchor_compat(&a, &cfg).passed());
        let j = check_jacobi(&a, &cfg);
        assert!(!j.passed());
        assert_eq!(j.witnesses[0].label, "frame (1,2,3)");
    }

    #[test]
    fn lie_derivative_examples() {
        let tm = DullAlgebroid::tangent(&p());
        let zero4 = section::zero(4);
        // a = ∂x on constant data
        let t = section::concat(&v("0", "1"), &v("0", "1"));
        assert_eq!(tm.lie_derivative_side(&v("1", "0"), &t), zero4);
        // a = x∂y on (∂x, 0): ([x∂y, ∂x], 0) = (−∂y, 0)
        let u = section::concat(&v("1", "0"), &v("0", "0"));
        assert_eq!(
            tm.lie_derivative_side(&v("0", "x"), &u),
            section::concat(&v("0", "-1"), &v("0", "0"))
        );
    }
}
