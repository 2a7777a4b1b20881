//! Multivariate polynomial gcd over ℚ.
//!
//! The heuristic gcd evaluates the main variable at a large integer, recurses,
//! and lifts the result back by ξ-adic interpolation; a candidate is accepted
//! only if it divides both inputs. When the heuristic gives up, recursive
//! primitive remainder sequences take over.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::poly::{Poly, Rational, MAX_VARS};

const HEURISTIC_TRIES: usize = 6;

/// Greatest common divisor, normalized to leading coefficient 1.
/// `gcd(0, 0)` is 0.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic().1;
    }
    if b.is_zero() {
        return a.monic().1;
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a == b {
        return a.monic().1;
    }
    if let Some(g) = heuristic(&integral(a), &integral(b)) {
        return g.monic().1;
    }
    remainder_gcd(a, b)
}

fn remainder_gcd(a: &Poly, b: &Poly) -> Poly {
    let sa = a.support();
    let sb = b.support();
    let common = sa & sb;
    if common == 0 {
        return Poly::one();
    }
    // main variable: the highest-index variable occurring in both
    let v = (0..MAX_VARS).rev().find(|&i| common & (1 << i) != 0).unwrap();
    // a variable present in only one argument divides out through the content
    let (ca, pa) = split_content(a, v);
    let (cb, pb) = split_content(b, v);
    let g_content = gcd(&ca, &cb);
    let g_prim = prs(pa, pb, v);
    (&g_content * &g_prim).monic().1
}

fn int(p: &Poly) -> impl Iterator<Item = &BigInt> {
    p.terms().iter().map(|(_, c)| c.numer())
}

/// `p` scaled to integer coefficients with content 1.
fn integral(p: &Poly) -> Poly {
    let l = p.terms().iter().fold(BigInt::one(), |l, (_, c)| l.lcm(c.denom()));
    let q = p.scale(&Rational::from_integer(l));
    let c = content(&q);
    q.scale(&Rational::new(BigInt::one(), c))
}

fn content(p: &Poly) -> BigInt {
    int(p).fold(BigInt::zero(), |g, c| g.gcd(c))
}

fn max_norm(p: &Poly) -> BigInt {
    int(p).map(|c| c.abs()).max().unwrap_or_default()
}

fn eval_at(p: &Poly, v: usize, x: &BigInt) -> Poly {
    Poly::from_terms(
        p.terms()
            .iter()
            .map(|(m, c)| (m.with_exp(v, 0), c * Rational::from_integer(x.pow(m.exp(v) as u32))))
            .collect(),
    )
}

/// Reads the integer coefficients of `h` as ξ-adic expansions with
/// symmetric digits, giving the coefficients of powers of `v`.
fn interpolate(h: &Poly, v: usize, x: &BigInt) -> Poly {
    let half = x / 2;
    let mut terms = Vec::new();
    for (m, c) in h.terms() {
        let mut c = c.numer().clone();
        let mut k = 0u16;
        while !c.is_zero() {
            let mut d = c.mod_floor(x);
            if d > half {
                d -= x;
            }
            if !d.is_zero() {
                terms.push((m.with_exp(v, k), Rational::from_integer(d.clone())));
            }
            c = (c - d) / x;
            k += 1;
        }
    }
    Poly::from_terms(terms)
}

/// Heuristic gcd of nonzero integer polynomials, exact up to sign, or
/// `None` when no evaluation point worked.
fn heuristic(f: &Poly, g: &Poly) -> Option<Poly> {
    if f.is_constant() || g.is_constant() {
        let c = content(f).gcd(&content(g));
        return Some(Poly::constant(Rational::from_integer(c)));
    }
    let c = content(f).gcd(&content(g));
    let cr = Rational::from_integer(c.clone());
    let (f, g) = (f.scale(&cr.recip()), g.scale(&cr.recip()));
    let v = (0..MAX_VARS)
        .rev()
        .find(|&i| (f.support() | g.support()) & (1 << i) != 0)?;
    let (fn_, gn) = (max_norm(&f), max_norm(&g));
    let b: BigInt = 2u32 * fn_.clone().min(gn.clone()) + 29u32;
    let lf = f.leading_coeff().numer().abs();
    let lg = g.leading_coeff().numer().abs();
    let floor: BigInt = 2u32 * (&fn_ / lf).min(&gn / lg) + 4u32;
    let mut x = b.clone().min(99u32 * b.sqrt()).max(floor);
    for _ in 0..HEURISTIC_TRIES {
        let (ff, gg) = (eval_at(&f, v, &x), eval_at(&g, v, &x));
        if !ff.is_zero() && !gg.is_zero() {
            if let Some(h) = heuristic(&ff, &gg) {
                let h = interpolate(&h, v, &x);
                if !h.is_zero() {
                    let h = h.scale(&Rational::new(BigInt::one(), content(&h)));
                    if f.div_exact(&h).is_some() && g.div_exact(&h).is_some() {
                        return Some(h.scale(&cr));
                    }
                }
            }
        }
        x = 73794u32 * &x * x.sqrt().sqrt() / 27011u32;
    }
    None
}

/// Content with respect to `v` (a polynomial free of `v`) and the primitive part.
fn split_content(p: &Poly, v: usize) -> (Poly, Poly) {
    let coeffs = p.coeffs_in(v);
    let mut c = Poly::zero();
    for q in coeffs.iter().rev() {
        if q.is_zero() {
            continue;
        }
        c = gcd(&c, q);
        if c.is_one() {
            break;
        }
    }
    if c.is_one() {
        return (c, p.monic().1);
    }
    let prim = p.div_exact(&c).expect("content divides");
    (c, prim.monic().1)
}

fn primitive_part(p: &Poly, v: usize) -> Poly {
    split_content(p, v).1
}

fn prs(mut a: Poly, mut b: Poly, v: usize) -> Poly {
    if a.degree_in(v) < b.degree_in(v) {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_zero() {
        if b.degree_in(v) == 0 {
            // b is free of v and primitive, so the gcd is a unit
            return Poly::one();
        }
        let r = pseudo_remainder(&a, &b, v);
        a = b;
        b = if r.is_zero() { r } else { primitive_part(&r, v) };
    }
    primitive_part(&a, v)
}

/// Pseudo-remainder of `a` by `b` in the variable `v`, up to a nonzero factor.
pub fn pseudo_remainder(a: &Poly, b: &Poly, v: usize) -> Poly {
    let db = b.degree_in(v);
    let lb = b.lc_in(v);
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lr = r.lc_in(v);
        let shift = super::poly::Monomial::var(v);
        let mut t = lr;
        for _ in 0..(dr - db) {
            t = t.mul_term(&shift, &Rational::one());
        }
        r = &(&r * &lb) - &(&t * b);
    }
    r
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
    fn z() -> Poly {
        Poly::var(2)
    }

    #[test]
    fn univariate() {
        let a = &(&x() - &Poly::one()) * &(&x() + &Poly::from_int(2));
        let b = &(&x() - &Poly::one()) * &(&x() - &Poly::from_int(5));
        assert_eq!(gcd(&a, &b), &x() - &Poly::one());
    }

    #[test]
    fn multivariate_common_factor() {
        let f = &(&x() * &y()) + &z();
        let g1 = &f * &(&x() + &y());
        let g2 = &f * &(&y() - &z()).pow(2);
        assert_eq!(gcd(&g1, &g2), f.monic().1);
    }

    #[test]
    fn coprime() {
        let a = &x() + &y();
        let b = &x() - &y();
        assert!(gcd(&a, &b).is_one());
    }

    #[test]
    fn heuristic_agrees_with_remainders() {
        let f = &(&(&x() * &y()) - &z().pow(2)) + &Poly::from_int(7);
        let cases = [
            (&f * &(&x() + &y()).pow(3), &f.pow(2) * &(&y() - &Poly::from_int(3))),
            (
                &(&x().pow(4) - &y()) * &(&z() + &Poly::one()),
                &(&x() - &y()) * &(&z() + &Poly::one()),
            ),
            (&x().pow(3) * &y().pow(2), &x() * &y().pow(5)),
        ];
        for (a, b) in &cases {
            let h = heuristic(&integral(a), &integral(b)).expect("heuristic succeeds");
            assert_eq!(h.monic().1, remainder_gcd(a, b));
        }
    }

    #[test]
    fn content_only_variable() {
        // y divides both but x-parts are coprime
        let a = &y() * &(&x() + &Poly::one());
        let b = &y() * &y();
        assert_eq!(gcd(&a, &b), y());
    }
}
