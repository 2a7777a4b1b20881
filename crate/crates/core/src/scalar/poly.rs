//! Sparse multivariate polynomials over ℚ.
//!
//! Terms are kept strictly descending in graded-lexicographic order with
//! coordinate 0 the most significant variable, and never carry a zero
//! coefficient. Every constructor and operation maintains that invariant, so
//! structural equality is polynomial equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// Largest supported number of patch coordinates.
pub const MAX_VARS: usize = 8;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Debug)]
pub struct Monomial([u16; MAX_VARS]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; MAX_VARS]);

    pub fn var(i: usize) -> Self {
        let mut e = [0; MAX_VARS];
        e[i] = 1;
        Monomial(e)
    }

    pub fn from_exponents(exps: &[u16]) -> Self {
        let mut e = [0; MAX_VARS];
        e[..exps.len()].copy_from_slice(exps);
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn exp(&self, i: usize) -> u16 {
        self.0[i]
    }

    pub fn exponents(&self) -> &[u16; MAX_VARS] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a += *b;
        }
        Monomial(e)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            if *a < *b {
                return None;
            }
            *a -= *b;
        }
        Some(Monomial(e))
    }

    pub fn with_exp(&self, i: usize, exp: u16) -> Monomial {
        let mut e = self.0;
        e[i] = exp;
        Monomial(e)
    }

    /// Bit set of the variables occurring with positive exponent.
    pub fn support(&self) -> u16 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .fold(0, |acc, (i, _)| acc | (1 << i))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: Vec<(Monomial, Rational)>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly {
                terms: vec![(Monomial::ONE, c)],
            }
        }
    }

    pub fn from_int(c: i64) -> Self {
        Poly::constant(Rational::from_integer(BigInt::from(c)))
    }

    pub fn var(i: usize) -> Self {
        Poly {
            terms: vec![(Monomial::var(i), Rational::one())],
        }
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    /// Builds a polynomial from terms in any order, merging duplicates.
    pub fn from_terms(mut terms: Vec<(Monomial, Rational)>) -> Self {
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Monomial, Rational)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += c,
                _ => {
                    if let Some((_, lc)) = out.last() {
                        if lc.is_zero() {
                            out.pop();
                        }
                    }
                    out.push((m, c));
                }
            }
        }
        if let Some((_, lc)) = out.last() {
            if lc.is_zero() {
                out.pop();
            }
        }
        Poly { terms: out }
    }

    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.terms.is_empty() {
            Some(Rational::zero())
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<&(Monomial, Rational)> {
        self.terms.first()
    }

    pub fn leading_coeff(&self) -> Rational {
        self.terms.first().map(|t| t.1.clone()).unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.first().map(|t| t.0.degree()).unwrap_or(0)
    }

    pub fn support(&self) -> u16 {
        self.terms.iter().fold(0, |acc, t| acc | t.0.support())
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        // multiplying by a monomial preserves the order
        Poly {
            terms: self.terms.iter().map(|(mm, a)| (mm.mul(m), a * c)).collect(),
        }
    }

    /// Divides by the leading coefficient; returns the coefficient too.
    pub fn monic(&self) -> (Rational, Poly) {
        match self.terms.first() {
            None => (Rational::one(), Poly::zero()),
            Some((_, lc)) if lc.is_one() => (Rational::one(), self.clone()),
            Some((_, lc)) => {
                let lc = lc.clone();
                let inv = lc.recip();
                (lc, self.scale(&inv))
            }
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.exp(var) > 0)
            .map(|(m, c)| {
                let e = m.exp(var);
                (m.with_exp(var, e - 1), c * Rational::from_integer(BigInt::from(e)))
            })
            .collect();
        // lowering one exponent may reorder terms of different degree classes
        Poly::from_terms(terms)
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, x) in point.iter().enumerate() {
                let e = m.exp(i);
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (dm, dc) = d.terms.first()?;
        if d.is_constant() {
            return Some(self.scale(&dc.recip()));
        }
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some((rm, rc)) = rem.terms.first() {
            let qm = rm.div(dm)?;
            let qc = rc / dc;
            rem = &rem - &d.mul_term(&qm, &qc);
            quot.push((qm, qc));
        }
        Some(Poly::from_terms(quot))
    }

    pub fn degree_in(&self, var: usize) -> u16 {
        self.terms.iter().map(|(m, _)| m.exp(var)).max().unwrap_or(0)
    }

    /// Coefficients with respect to `var`: entry `k` is the coefficient of `var^k`.
    pub fn coeffs_in(&self, var: usize) -> Vec<Poly> {
        let deg = self.degree_in(var) as usize;
        let mut buckets: Vec<Vec<(Monomial, Rational)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            buckets[m.exp(var) as usize].push((m.with_exp(var, 0), c.clone()));
        }
        buckets.into_iter().map(Poly::from_terms).collect()
    }

    /// Leading coefficient with respect to `var`.
    pub fn lc_in(&self, var: usize) -> Poly {
        let deg = self.degree_in(var);
        Poly::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m.exp(var) == deg)
                .map(|(m, c)| (m.with_exp(var, 0), c.clone()))
                .collect(),
        )
    }

    pub fn integer_content_sign(&self) -> bool {
        self.terms.first().map(|t| t.1.is_positive()).unwrap_or(true)
    }

    /// Canonical text using the given coordinate names.
    pub fn to_text(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let a = c.abs();
            let mono = monomial_text(m, names);
            match (a.is_one(), mono.is_empty()) {
                (true, false) => out.push_str(&mono),
                (_, true) => out.push_str(&a.to_string()),
                (false, false) => {
                    out.push_str(&a.to_string());
                    out.push('*');
                    out.push_str(&mono);
                }
            }
        }
        out
    }
}

fn monomial_text(m: &Monomial, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        if e == 0 {
            continue;
        }
        let name = names.get(i).cloned().unwrap_or_else(|| format!("x{}", i + 1));
        if e == 1 {
            parts.push(name);
        } else {
            parts.push(format!("{name}^{e}"));
        }
    }
    parts.join("*")
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text(&[]))
    }
}

fn merge(a: &[(Monomial, Rational)], b: &[(Monomial, Rational)], negate_b: bool) -> Poly {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            Ordering::Greater => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Less => {
                let c = if negate_b { -&b[j].1 } else { b[j].1.clone() };
                out.push((b[j].0, c));
                j += 1;
            }
            Ordering::Equal => {
                let c = if negate_b { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                if !c.is_zero() {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend(a[i..].iter().cloned());
    for t in &b[j..] {
        let c = if negate_b { -&t.1 } else { t.1.clone() };
        out.push((t.0, c));
    }
    Poly { terms: out }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        merge(&self.terms, &rhs.terms, false)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        merge(&self.terms, &rhs.terms, true)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        if rhs.terms.len() == 1 {
            return self.mul_term(&rhs.terms[0].0, &rhs.terms[0].1);
        }
        if self.terms.len() == 1 {
            return rhs.mul_term(&self.terms[0].0, &self.terms[0].1);
        }
        let mut prods = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                prods.push((ma.mul(mb), ca * cb));
            }
        }
        Poly::from_terms(prods)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Poly {
        Poly::var(0)
    }
    fn y() -> Poly {
        Poly::var(1)
    }

    #[test]
    fn grlex_orders_by_degree_then_lex() {
        let x2 = Monomial::from_exponents(&[2, 0]);
        let xy = Monomial::from_exponents(&[1, 1]);
        let y3 = Monomial::from_exponents(&[0, 3]);
        assert!(x2 > xy);
        assert!(y3 > x2);
        assert!(Monomial::var(0) > Monomial::var(1));
    }

    #[test]
    fn cancellation_gives_zero() {
        let p = &(&x() * &y()) - &(&y() * &x());
        assert!(p.is_zero());
    }

    #[test]
    fn exact_division() {
        let s = &x() + &y();
        let sq = &s * &s;
        assert_eq!(sq.div_exact(&s), Some(s.clone()));
        assert_eq!(sq.div_exact(&x()), None);
    }

    #[test]
    fn derivative_power_rule() {
        let p = &(&x() * &x()) * &y();
        let two = Rational::from_integer(BigInt::from(2));
        assert_eq!(p.derivative(0), (&x() * &y()).scale(&two));
        assert!(p.derivative(2).is_zero());
    }

    #[test]
    fn text_is_canonical() {
        let names = vec!["x".to_string(), "y".to_string()];
        let p = &(&(&x() * &x()) - &y().scale(&Rational::new(3.into(), 2.into()))) + &Poly::from_int(-1);
        assert_eq!(p.to_text(&names), "x^2 - 3/2*y - 1");
    }
}
