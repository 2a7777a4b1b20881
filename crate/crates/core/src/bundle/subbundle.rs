use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::matrix::{self, Mat};
use super::section::{self, Sec};

/// Independent sections of a rank-`len` bundle together with a certified
/// nonvanishing maximal minor.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    vectors: Vec<Sec>,
    len: usize,
    cert_rows: Vec<usize>,
    cert_det: Scalar,
    minor_inv: Mat,
}

impl Frame {
    pub fn new(vectors: Vec<Sec>, len: usize) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != len) {
            return Err(Error::Shape(format!(
                "frame vector has {} components, bundle rank is {len}",
                v.len()
            )));
        }
        let (cert_rows, cert_det) = matrix::rank_certificate(&vectors, len)?;
        let minor: Mat = (0..vectors.len())
            .map(|r| vectors.iter().map(|v| v[cert_rows[r]].clone()).collect())
            .collect();
        let minor_inv = if vectors.is_empty() {
            Vec::new()
        } else {
            matrix::inverse(&minor)?
        };
        Ok(Frame {
            vectors,
            len,
            cert_rows,
            cert_det,
            minor_inv,
        })
    }

    pub fn standard(len: usize) -> Self {
        Frame::new(section::standard_frame(len), len).expect("standard frame is independent")
    }

    pub fn vectors(&self) -> &[Sec] {
        &self.vectors
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn ambient_rank(&self) -> usize {
        self.len
    }

    /// Coordinates used by the rank certificate.
    pub fn certificate_rows(&self) -> &[usize] {
        &self.cert_rows
    }

    /// Determinant of the certified minor; the frame has constant rank where
    /// it does not vanish.
    pub fn certificate(&self) -> &Scalar {
        &self.cert_det
    }

    /// Coefficients of `s` in this frame, or `None` if `s` is not in the span.
    pub fn coords(&self, s: &[Scalar]) -> Option<Vec<Scalar>> {
        let rhs: Vec<Scalar> = self.cert_rows.iter().map(|&i| s[i].clone()).collect();
        let c = matrix::mat_vec(&self.minor_inv, &rhs);
        let back = section::combine(&c, &self.vectors, self.len);
        if back.as_slice() == s {
            Some(c)
        } else {
            None
        }
    }

    pub fn contains(&self, s: &[Scalar]) -> bool {
        self.coords(s).is_some()
    }

    /// Covectors annihilating every frame vector, as a nullspace basis.
    pub fn annihilating_covectors(&self) -> Vec<Sec> {
        matrix::nullspace(&self.vectors, self.len)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Membership {
    Member(Vec<Scalar>),
    /// A covector vanishing on the subbundle but not on the section.
    NotMember(Sec),
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member(_))
    }
}

pub fn membership(s: &[Scalar], frame: &Frame) -> Membership {
    match frame.coords(s) {
        Some(c) => Membership::Member(c),
        None => {
            let w = frame
                .annihilating_covectors()
                .into_iter()
                .find(|w| !section::dot(w, s).is_zero())
                .expect("a section outside the span is separated by some covector");
            Membership::NotMember(w)
        }
    }
}

/// Greedy complement by standard basis vectors in index order.
pub fn complement(frame: &Frame) -> Frame {
    let len = frame.ambient_rank();
    let mut current = frame.vectors().to_vec();
    let mut added = Vec::new();
    for i in 0..len {
        if current.len() == len {
            break;
        }
        let e = section::basis(len, i);
        current.push(e.clone());
        if matrix::rank(&current, len) == current.len() {
            added.push(e);
        } else {
            current.pop();
        }
    }
    Frame::new(added, len).expect("standard vectors are independent")
}

/// Whether two frames span the same subbundle.
pub fn same_span(a: &Frame, b: &Frame) -> bool {
    a.rank() == b.rank() && a.vectors().iter().all(|v| b.contains(v)) && b.vectors().iter().all(|v| a.contains(v))
}

/// Block layout of `TM ⊕ A*` (side) and `A ⊕ T*M` (core) over an
/// `n`-dimensional patch for a rank-`r` bundle `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub n: usize,
    pub r: usize,
}

impl Layout {
    pub fn new(n: usize, r: usize) -> Self {
        Layout { n, r }
    }

    pub fn len(&self) -> usize {
        self.n + self.r
    }

    /// `(X, α)` in `TM ⊕ A*`.
    pub fn side(&self, x: &[Scalar], alpha: &[Scalar]) -> Sec {
        section::concat(x, alpha)
    }

    /// `(a, θ)` in `A ⊕ T*M`.
    pub fn core(&self, a: &[Scalar], theta: &[Scalar]) -> Sec {
        section::concat(a, theta)
    }

    pub fn side_parts<'a>(&self, v: &'a [Scalar]) -> (&'a [Scalar], &'a [Scalar]) {
        v.split_at(self.n)
    }

    pub fn core_parts<'a>(&self, t: &'a [Scalar]) -> (&'a [Scalar], &'a [Scalar]) {
        t.split_at(self.r)
    }

    /// `⟨(X,α),(a,θ)⟩ = θ(X) + α(a)`.
    pub fn pair(&self, v: &[Scalar], t: &[Scalar]) -> Scalar {
        let (x, alpha) = self.side_parts(v);
        let (a, theta) = self.core_parts(t);
        &section::dot(theta, x) + &section::dot(alpha, a)
    }

    /// The covector on `A ⊕ T*M` given by pairing with `v`.
    pub fn side_as_covector(&self, v: &[Scalar]) -> Sec {
        let (x, alpha) = self.side_parts(v);
        section::concat(alpha, x)
    }

    /// The covector on `TM ⊕ A*` given by pairing with `t`.
    pub fn core_as_covector(&self, t: &[Scalar]) -> Sec {
        let (a, theta) = self.core_parts(t);
        section::concat(theta, a)
    }

    /// `U° ⊆ A ⊕ T*M` for `U ⊆ TM ⊕ A*`.
    pub fn annihilator_of_side(&self, u: &Frame) -> Result<Frame> {
        let rows: Vec<Sec> = u.vectors().iter().map(|v| self.side_as_covector(v)).collect();
        let ns = matrix::nullspace(&rows, self.len());
        Frame::new(ns, self.len())
    }

    /// `K° ⊆ TM ⊕ A*` for `K ⊆ A ⊕ T*M`.
    pub fn annihilator_of_core(&self, k: &Frame) -> Result<Frame> {
        let rows: Vec<Sec> = k.vectors().iter().map(|t| self.core_as_covector(t)).collect();
        let ns = matrix::nullspace(&rows, self.len());
        Frame::new(ns, self.len())
    }
}

/// `⟨(a₁,θ₁),(a₂,θ₂)⟩_d = θ₂(ρa₁) + θ₁(ρa₂)`; `anchor` is `n × r`.
pub fn degenerate_pairing(t1: &[Scalar], t2: &[Scalar], anchor: &Mat) -> Result<Scalar> {
    let n = anchor.len();
    let r = t1
        .len()
        .checked_sub(n)
        .ok_or_else(|| Error::Shape("section too short".into()))?;
    if t2.len() != t1.len() || anchor.iter().any(|row| row.len() != r) {
        return Err(Error::Shape("degenerate pairing: inconsistent ranks".into()));
    }
    let (a1, th1) = t1.split_at(r);
    let (a2, th2) = t2.split_at(r);
    let ra1 = matrix::mat_vec(anchor, a1);
    let ra2 = matrix::mat_vec(anchor, a2);
    Ok(&section::dot(th2, &ra1) + &section::dot(th1, &ra2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(c: i64) -> Scalar {
        Scalar::from_int(c)
    }

    #[test]
    fn membership_with_witness() {
        let f = Frame::new(vec![vec![s(1), s(0)]], 2).unwrap();
        assert_eq!(membership(&[s(3), s(0)], &f), Membership::Member(vec![s(3)]));
        match membership(&[s(0), s(1)], &f) {
            Membership::NotMember(w) => assert_eq!(w, vec![s(0), s(1)]),
            m => panic!("{m:?}"),
        }
    }

    #[test]
    fn greedy_complement() {
        let x = Scalar::var(0);
        let f = Frame::new(vec![vec![s(1), x]], 2).unwrap();
        assert_eq!(complement(&f).vectors(), &[vec![s(1), s(0)]]);
        let f = Frame::new(vec![vec![s(1), s(0)]], 2).unwrap();
        assert_eq!(complement(&f).vectors(), &[vec![s(0), s(1)]]);
        let f = Frame::new(vec![], 2).unwrap();
        assert_eq!(complement(&f).rank(), 2);
    }
}
