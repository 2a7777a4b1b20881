//! Seeded random polynomial sections for the identity-checking protocol.
//!
//! Each check derives its own stream from `(seed, check name)`, so the order
//! in which checks run cannot change any sampled value.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bundle::Sec;
use crate::scalar::{Monomial, Poly, Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CheckConfig {
    pub seed: u64,
    pub trials: usize,
    pub max_degree: u32,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            seed: 0,
            trials: 8,
            max_degree: 2,
        }
    }
}

fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub struct Sampler {
    rng: ChaCha8Rng,
    monomials: Vec<Monomial>,
}

impl Sampler {
    pub fn new(cfg: &CheckConfig, check_name: &str, dim: usize) -> Self {
        let rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ fnv1a(check_name));
        Sampler {
            rng,
            monomials: monomials_up_to(dim, cfg.max_degree),
        }
    }

    fn coeff(&mut self) -> i64 {
        self.rng.gen_range(-3..=3)
    }

    /// A polynomial with every monomial of degree ≤ D and coefficients in −3..=3.
    pub fn scalar(&mut self) -> Scalar {
        let mut terms = Vec::with_capacity(self.monomials.len());
        for k in 0..self.monomials.len() {
            let c = self.coeff();
            terms.push((self.monomials[k], Rational::from_integer(BigInt::from(c))));
        }
        Scalar::from_poly(Poly::from_terms(terms))
    }

    pub fn section(&mut self, len: usize) -> Sec {
        (0..len).map(|_| self.scalar()).collect()
    }

    /// A random combination of the given frame vectors.
    pub fn in_span(&mut self, frame: &[Sec], len: usize) -> Sec {
        let coeffs: Vec<Scalar> = frame.iter().map(|_| self.scalar()).collect();
        crate::bundle::section::combine(&coeffs, frame, len)
    }

    /// A random rational constant, for spot evaluations.
    pub fn small_int(&mut self) -> i64 {
        self.coeff()
    }
}

pub fn monomials_up_to(dim: usize, deg: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::ONE];
    let mut frontier = vec![Monomial::ONE];
    for _ in 0..deg {
        let mut next = Vec::new();
        for m in &frontier {
            for i in 0..dim {
                let k = m.mul(&Monomial::var(i));
                if !next.contains(&k) {
                    next.push(k);
                }
            }
        }
        out.extend(next.iter().copied());
        frontier = next;
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_count() {
        assert_eq!(monomials_up_to(2, 2).len(), 6);
        assert_eq!(monomials_up_to(3, 2).len(), 10);
        assert_eq!(monomials_up_to(1, 0).len(), 1);
    }

    #[test]
    fn streams_depend_on_name_and_seed() {
        let cfg = CheckConfig::default();
        let a = Sampler::new(&cfg, "jacobi", 2).section(3);
        let b = Sampler::new(&cfg, "jacobi", 2).section(3);
        let c = Sampler::new(&cfg, "skew", 2).section(3);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
