//! Dorfman `(TM ⊕ A*)`-connections on `A ⊕ T*M`, their dual dull brackets,
//! the map Ω, the basic connections and curvatures, and the extension of a
//! Lie algebroid bracket on `U ⊆ TM ⊕ A*` to a dull bracket.

use crate::algebroid::{DullAlgebroid, DullBracket};
use crate::bundle::matrix::{self, Mat};
use crate::bundle::section::{self, Sec};
use crate::bundle::{complement, Frame, Layout, Patch};
use crate::cartan;
use crate::check::{verify, Outcome};
use crate::error::{Error, Result};
use crate::sampling::{CheckConfig, Sampler};
use crate::scalar::Scalar;

/// Frame table `table[i][j] = Δ_{q_i} b_j` on the standard frames of
/// `Q = TM ⊕ A*` (anchored by `pr_TM`) and `B = A ⊕ T*M`.
#[derive(Clone, Debug, PartialEq)]
pub struct DorfmanConnection {
    pub patch: Patch,
    pub layout: Layout,
    pub table: Vec<Vec<Sec>>,
    dual: DullAlgebroid,
}

impl DorfmanConnection {
    pub fn new(patch: &Patch, rank_a: usize, table: Vec<Vec<Sec>>) -> Result<Self> {
        let layout = Layout::new(patch.dim(), rank_a);
        let m = layout.len();
        if table.len() != m
            || table
                .iter()
                .any(|row| row.len() != m || row.iter().any(|s| s.len() != m))
        {
            return Err(Error::Shape(format!(
                "Dorfman table must be {m}×{m} sections of rank {m}"
            )));
        }
        let dual = dual_of_table(patch, layout, &table);
        Ok(DorfmanConnection {
            patch: patch.clone(),
            layout,
            table,
            dual,
        })
    }

    /// The Dorfman connection dual to a dull bracket on `TM ⊕ A*` anchored
    /// by `pr_TM`: `⟨Δ_{q_i} b_j, q_l⟩ = −⟨⟦q_i, q_l⟧, b_j⟩`.
    pub fn from_dull(dull: &DullAlgebroid, rank_a: usize) -> Result<Self> {
        let patch = dull.patch.clone();
        let layout = Layout::new(patch.dim(), rank_a);
        let m = layout.len();
        if dull.rank() != m {
            return Err(Error::Shape("dull bracket must live on TM ⊕ A*".into()));
        }
        let n = layout.n;
        let r = layout.r;
        let mut table = vec![vec![section::zero(m); m]; m];
        for (i, row) in table.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                let b = section::basis(m, j);
                // a-part pairs with the A*-directions, θ-part with the TM-directions
                for mm in 0..r {
                    let s = &dull.structure[i][n + mm];
                    entry[mm] = -&layout.pair(s, &b);
                }
                for k in 0..n {
                    let s = &dull.structure[i][k];
                    entry[r + k] = -&layout.pair(s, &b);
                }
            }
        }
        DorfmanConnection::new(&patch, rank_a, table)
    }

    /// `Δ_q b = Σ f_i g_j Δ_{q_i}b_j + Σ_j X(g_j) b_j + (0, Σ_k θ_k dX^k + Σ_m a_m dα_m)`
    /// for `q = (X,α) = Σ f_i q_i` and `b = (a,θ) = Σ g_j b_j`.
    pub fn eval(&self, q: &[Scalar], b: &[Scalar]) -> Sec {
        let l = self.layout;
        let m = l.len();
        let mut out = section::zero(m);
        for (i, f) in q.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            for (j, g) in b.iter().enumerate() {
                if g.is_zero() || section::is_zero(&self.table[i][j]) {
                    continue;
                }
                section::axpy(&mut out, &(f * g), &self.table[i][j]);
            }
        }
        let (x, alpha) = l.side_parts(q);
        for (o, g) in out.iter_mut().zip(b) {
            let d = cartan::apply_vf(x, g);
            if !d.is_zero() {
                *o = &*o + &d;
            }
        }
        let (a, theta) = l.core_parts(b);
        let mut form = section::zero(l.n);
        for (tk, xk) in theta.iter().zip(x) {
            if !tk.is_zero() {
                section::axpy(&mut form, tk, &cartan::d_function(xk, l.n));
            }
        }
        for (am, alm) in a.iter().zip(alpha) {
            if !am.is_zero() {
                section::axpy(&mut form, am, &cartan::d_function(alm, l.n));
            }
        }
        for (k, f) in form.iter().enumerate() {
            if !f.is_zero() {
                out[l.r + k] = &out[l.r + k] + f;
            }
        }
        out
    }

    /// The dual dull bracket `⟦·,·⟧_Δ` on `TM ⊕ A*`.
    pub fn dull(&self) -> &DullAlgebroid {
        &self.dual
    }

    pub fn dull_bracket(&self, q1: &[Scalar], q2: &[Scalar]) -> Sec {
        self.dual.bracket(q1, q2)
    }

    /// `𝐝_B f = (0, df)`.
    pub fn d_b(&self, f: &Scalar) -> Sec {
        let l = self.layout;
        l.core(&section::zero(l.r), &cartan::d_function(f, l.n))
    }

    /// `R_Δ(u₁,u₂)τ = Δ_{u₁}Δ_{u₂}τ − Δ_{u₂}Δ_{u₁}τ − Δ_{⟦u₁,u₂⟧}τ`.
    pub fn curvature(&self, u1: &[Scalar], u2: &[Scalar], t: &[Scalar]) -> Sec {
        let t1 = self.eval(u1, &self.eval(u2, t));
        let t2 = self.eval(u2, &self.eval(u1, t));
        let t3 = self.eval(&self.dull_bracket(u1, u2), t);
        section::sub(&section::sub(&t1, &t2), &t3)
    }
}

fn dual_of_table(patch: &Patch, layout: Layout, table: &[Vec<Sec>]) -> DullAlgebroid {
    let m = layout.len();
    let n = layout.n;
    let r = layout.r;
    // ⟨⟦q_i,q_l⟧, b_j⟩ = −⟨q_l, Δ_{q_i} b_j⟩; the X-part k pairs with (0,dx^k),
    // the α-part m with (e_m, 0)
    let structure: Vec<Vec<Sec>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|l| {
                    let ql = section::basis(m, l);
                    let mut s = section::zero(m);
                    for k in 0..n {
                        s[k] = -&layout.pair(&ql, &table[i][r + k]);
                    }
                    for mm in 0..r {
                        s[n + mm] = -&layout.pair(&ql, &table[i][mm]);
                    }
                    s
                })
                .collect()
        })
        .collect();
    let anchor: Mat = (0..n)
        .map(|k| {
            (0..m)
                .map(|c| if c == k { Scalar::one() } else { Scalar::zero() })
                .collect()
        })
        .collect();
    DullAlgebroid::new("TM+A*", patch, anchor, structure).expect("shapes agree")
}

/// Dorfman connection together with the Lie algebroid `A` it lives over.
pub struct Dorfman<'a> {
    pub alg: &'a DullAlgebroid,
    pub delta: &'a DorfmanConnection,
}

impl Dorfman<'_> {
    fn l(&self) -> Layout {
        self.delta.layout
    }

    /// `Ω_{(X,α)} a = Δ_{(X,α)}(a,0) − (0, d⟨α,a⟩)`.
    pub fn omega(&self, v: &[Scalar], a: &[Scalar]) -> Sec {
        let l = self.l();
        let (_, alpha) = l.side_parts(v);
        let t = l.core(a, &section::zero(l.n));
        section::sub(&self.delta.eval(v, &t), &self.delta.d_b(&section::dot(alpha, a)))
    }

    /// `∇^bas_a ν = (ρ,ρ^t)(Ω_ν a) + ℒ_a ν`.
    pub fn nabla_side(&self, a: &[Scalar], v: &[Scalar]) -> Sec {
        section::add(
            &self.alg.rho_rhot(&self.omega(v, a)),
            &self.alg.lie_derivative_side(a, v),
        )
    }

    /// `∇^bas_a τ = Ω_{(ρ,ρ^t)τ} a + ℒ_a τ`.
    pub fn nabla_core(&self, a: &[Scalar], t: &[Scalar]) -> Sec {
        section::add(
            &self.omega(&self.alg.rho_rhot(t), a),
            &self.alg.lie_derivative_core(a, t),
        )
    }

    /// `R^bas_Δ(a₁,a₂)ν = −Ω_ν[a₁,a₂] + ℒ_{a₁}Ω_ν a₂ − ℒ_{a₂}Ω_ν a₁
    ///  + Ω_{∇^bas_{a₂}ν} a₁ − Ω_{∇^bas_{a₁}ν} a₂`.
    pub fn basic_curvature(&self, a1: &[Scalar], a2: &[Scalar], v: &[Scalar]) -> Sec {
        let alg = self.alg;
        let mut out = section::neg(&self.omega(v, &alg.bracket(a1, a2)));
        section::add_assign(&mut out, &alg.lie_derivative_core(a1, &self.omega(v, a2)));
        section::sub_assign(&mut out, &alg.lie_derivative_core(a2, &self.omega(v, a1)));
        section::add_assign(&mut out, &self.omega(&self.nabla_side(a2, v), a1));
        section::sub_assign(&mut out, &self.omega(&self.nabla_side(a1, v), a2));
        out
    }

    /// `∇^bas_τ = ∇^bas_{pr_A τ}`.
    pub fn pr_a<'b>(&self, t: &'b [Scalar]) -> &'b [Scalar] {
        self.l().core_parts(t).0
    }
}

/// Checks the Dorfman laws: table consistency, the derivation law (1),
/// law (2) and `Δ_q(𝐝_B f) = 𝐝_B(ρ_Q(q) f)` (3).
pub fn check_dorfman_axioms(d: &DorfmanConnection, cfg: &CheckConfig) -> Vec<Outcome> {
    let l = d.layout;
    let m = l.len();
    let patch = &d.patch;
    let frame = section::standard_frame(m);

    let mut table = Outcome::new("dorfman.table");
    for i in 0..m {
        for j in 0..m {
            let r = section::sub(&d.eval(&frame[i], &frame[j]), &d.table[i][j]);
            table.expect_zero(patch, || format!("entry ({},{})", i + 1, j + 1), &r);
        }
    }

    let mut s = Sampler::new(cfg, "dorfman.law3", patch.dim());
    let fs: Vec<Scalar> = (0..cfg.trials.max(1)).map(|_| s.scalar()).collect();
    let mut law3 = Outcome::new("dorfman.law3");
    for (t, f) in fs.iter().enumerate() {
        let db = d.d_b(f);
        for (i, q) in frame.iter().enumerate() {
            let lhs = d.eval(q, &db);
            let rhs = d.d_b(&cartan::apply_vf(l.side_parts(q).0, f));
            law3.expect_zero(
                patch,
                || format!("q{} with random f #{}", i + 1, t + 1),
                &section::sub(&lhs, &rhs),
            );
        }
        let q = s.section(m);
        let lhs = d.eval(&q, &db);
        let rhs = d.d_b(&cartan::apply_vf(l.side_parts(&q).0, f));
        law3.expect_zero(patch, || format!("random q, f #{}", t + 1), &section::sub(&lhs, &rhs));
    }

    let mut s = Sampler::new(cfg, "dorfman.leibniz", patch.dim());
    let randoms: Vec<Vec<Sec>> = (0..cfg.trials)
        .map(|_| vec![s.section(m), s.section(m), vec![s.scalar()]])
        .collect();
    let mut leibniz = Outcome::new("dorfman.leibniz");
    verify(
        &mut leibniz,
        patch,
        &[],
        3,
        &randoms,
        |a| {
            let (q, b, g) = (a[0], a[1], &a[2][0]);
            // law (1): Δ_q(g b) − gΔ_q b − X(g) b
            let x = l.side_parts(q).0;
            let mut r1 = d.eval(q, &section::scale(g, b));
            section::sub_assign(&mut r1, &section::scale(g, &d.eval(q, b)));
            section::sub_assign(&mut r1, &section::scale(&cartan::apply_vf(x, g), b));
            // law (2): Δ_{g q} b − gΔ_q b − ⟨q,b⟩ 𝐝_B g
            let mut r2 = d.eval(&section::scale(g, q), b);
            section::sub_assign(&mut r2, &section::scale(g, &d.eval(q, b)));
            section::sub_assign(&mut r2, &section::scale(&l.pair(q, b), &d.d_b(g)));
            section::concat(&r1, &r2)
        },
        section::is_zero,
    );
    vec![table, law3, leibniz]
}

/// Extends a Lie algebroid bracket on `U ⊆ TM ⊕ A*` (anchor `pr_TM`) to a
/// dull bracket on `TM ⊕ A*` and returns the dual Dorfman connection.
///
/// `u_bracket[i][j]` holds the coefficients of `[u_i, u_j]_U` in the frame
/// of `u`. Pairs involving the complement `W` get `([pr p, pr q], 0)`. With
/// `w = None` the greedy complement is used.
pub fn extend_lie_bracket_to_dull(
    patch: &Patch,
    rank_a: usize,
    u: &Frame,
    u_bracket: &[Vec<Sec>],
    w: Option<&Frame>,
) -> Result<DorfmanConnection> {
    let layout = Layout::new(patch.dim(), rank_a);
    let m = layout.len();
    let n = layout.n;
    let k = u.rank();
    if u.ambient_rank() != m || u_bracket.len() != k {
        return Err(Error::Shape("U frame and bracket table disagree".into()));
    }
    let w = match w {
        Some(w) => w.clone(),
        None => complement(u),
    };
    let mut frame: Vec<Sec> = u.vectors().to_vec();
    frame.extend(w.vectors().iter().cloned());
    if frame.len() != m {
        return Err(Error::RankDrop("U and W do not span TM ⊕ A*".into()));
    }
    let pr = |v: &[Scalar]| v[..n].to_vec();

    // bracket on the adapted frame
    let mut fb = vec![vec![section::zero(m); m]; m];
    for a in 0..m {
        for b in 0..m {
            fb[a][b] = if a < k && b < k {
                let c = &u_bracket[a][b];
                if c.len() != k {
                    return Err(Error::Shape("U bracket coefficients have wrong length".into()));
                }
                let v = section::combine(c, u.vectors(), m);
                let expect = cartan::lie_bracket_vf(&pr(&frame[a]), &pr(&frame[b]));
                if pr(&v) != expect {
                    return Err(Error::Precondition(format!(
                        "anchor mismatch: pr_TM[u{},u{}]_U ≠ [pr_TM u{}, pr_TM u{}]",
                        a + 1,
                        b + 1,
                        a + 1,
                        b + 1
                    )));
                }
                v
            } else {
                let x = cartan::lie_bracket_vf(&pr(&frame[a]), &pr(&frame[b]));
                section::concat(&x, &section::zero(rank_a))
            };
        }
    }

    // standard vectors in the adapted frame: e_l = Σ_a minv[a][l] p_a
    let p: Mat = (0..m)
        .map(|row| frame.iter().map(|v| v[row].clone()).collect())
        .collect();
    let minv = matrix::inverse(&p)?;
    let coeffs: Vec<Sec> = (0..m).map(|l| (0..m).map(|a| minv[a][l].clone()).collect()).collect();

    let mut structure = vec![vec![section::zero(m); m]; m];
    for l in 0..m {
        for mm in 0..m {
            let f = &coeffs[l];
            let g = &coeffs[mm];
            let mut out = section::zero(m);
            for a in 0..m {
                if f[a].is_zero() {
                    continue;
                }
                for b in 0..m {
                    if g[b].is_zero() {
                        continue;
                    }
                    section::axpy(&mut out, &(&f[a] * &g[b]), &fb[a][b]);
                }
            }
            let xl = pr(&section::basis(m, l));
            let xm = pr(&section::basis(m, mm));
            for b in 0..m {
                section::axpy(&mut out, &cartan::apply_vf(&xl, &g[b]), &frame[b]);
            }
            for a in 0..m {
                let d = cartan::apply_vf(&xm, &f[a]);
                section::axpy(&mut out, &(-&d), &frame[a]);
            }
            structure[l][mm] = out;
        }
    }
    let anchor: Mat = (0..n)
        .map(|kk| {
            (0..m)
                .map(|c| if c == kk { Scalar::one() } else { Scalar::zero() })
                .collect()
        })
        .collect();
    let dull = DullAlgebroid::new("TM+A*", patch, anchor, structure)?;
    DorfmanConnection::from_dull(&dull, rank_a)
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
    fn v(xs: &[&str]) -> Sec {
        xs.iter().map(|s| e(s)).collect()
    }

    fn flat() -> DorfmanConnection {
        DorfmanConnection::new(&p(), 2, vec![vec![section::zero(4); 4]; 4]).unwrap()
    }

    #[test]
    fn flat_connection_eval() {
        let d = flat();
        // ((x∂y, 0), (∂x, dy)) ↦ (0, d(x)) since θ = dy pairs with X^2 = x
        let r = d.eval(&v(&["0", "x", "0", "0"]), &v(&["1", "0", "0", "1"]));
        assert_eq!(r, v(&["0", "0", "1", "0"]));
        assert!(check_dorfman_axioms(&d, &CheckConfig::default())
            .iter()
            .all(Outcome::passed));
    }

    #[test]
    fn perturbed_table_breaks_law3() {
        let mut table = vec![vec![section::zero(4); 4]; 4];
        // Δ_{q1}(0, dx) += (e1, 0)
        table[0][2] = v(&["1", "0", "0", "0"]);
        let d = DorfmanConnection::new(&p(), 2, table).unwrap();
        let outs = check_dorfman_axioms(&d, &CheckConfig::default());
        assert!(!outs.iter().find(|o| o.name == "dorfman.law3").unwrap().passed());
    }

    #[test]
    fn dual_round_trip() {
        let d = flat();
        let back = DorfmanConnection::from_dull(d.dull(), 2).unwrap();
        assert_eq!(back.table, d.table);
        // dual bracket of the flat connection: ([X1,X2], X1(α2) − X2(α1))
        let q1 = v(&["0", "x", "x", "0"]);
        let q2 = v(&["1", "0", "0", "x"]);
        assert_eq!(d.dull_bracket(&q1, &q2), v(&["0", "-1", "-1", "0"]));
    }
}
