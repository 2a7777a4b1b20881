//! Rational functions in canonical form.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::gcd::gcd;
use super::poly::{Poly, Rational};
use crate::error::{Error, Result};

/// A reduced fraction of polynomials with monic denominator.
///
/// Zero is always `0/1`, so equality of values is structural equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    num: Poly,
    den: Poly,
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Scalar {
            num: Poly::one(),
            den: Poly::one(),
        }
    }

    pub fn from_int(c: i64) -> Self {
        Scalar::from_poly(Poly::from_int(c))
    }

    pub fn from_rational(c: Rational) -> Self {
        Scalar::from_poly(Poly::constant(c))
    }

    pub fn var(i: usize) -> Self {
        Scalar::from_poly(Poly::var(i))
    }

    pub fn from_poly(num: Poly) -> Self {
        Scalar { num, den: Poly::one() }
    }

    /// Builds `num/den` in canonical form.
    pub fn fraction(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Scalar::zero();
        }
        if den.is_constant() {
            let c = den.constant_value().unwrap();
            return Scalar {
                num: if c.is_one() { num } else { num.scale(&c.recip()) },
                den: Poly::one(),
            };
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        Self::normalize_lc(num, den)
    }

    fn normalize_lc(num: Poly, den: Poly) -> Self {
        let (lc, den) = den.monic();
        let num = if lc.is_one() { num } else { num.scale(&lc.recip()) };
        if den.is_one() {
            return Scalar { num, den: Poly::one() };
        }
        Scalar { num, den }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn scale(&self, c: &Rational) -> Scalar {
        if c.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize_lc(self.den.clone(), self.num.clone()))
    }

    pub fn pow(&self, e: u32) -> Scalar {
        if e == 0 {
            return Scalar::one();
        }
        // powers of a reduced fraction stay reduced
        Self::normalize_lc(self.num.pow(e), self.den.pow(e))
    }

    pub fn derivative(&self, var: usize) -> Scalar {
        if self.den.is_one() {
            return Scalar::from_poly(self.num.derivative(var));
        }
        let dn = self.num.derivative(var);
        let dd = self.den.derivative(var);
        if dd.is_zero() {
            return Self::reduce(dn, self.den.clone());
        }
        let top = &(&dn * &self.den) - &(&self.num * &dd);
        Self::reduce(top, &self.den * &self.den)
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(Error::Pole {
                den: self.den.to_text(&[]),
            });
        }
        Ok(self.num.eval(point) / d)
    }

    pub fn to_text(&self, names: &[String]) -> String {
        if self.den.is_one() {
            self.num.to_text(names)
        } else {
            format!("({})/({})", self.num.to_text(names), self.den.to_text(names))
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.num.total_degree().max(self.den.total_degree())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text(&[]))
    }
}

impl From<i64> for Scalar {
    fn from(c: i64) -> Self {
        Scalar::from_int(c)
    }
}

impl From<Poly> for Scalar {
    fn from(p: Poly) -> Self {
        Scalar::from_poly(p)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        if self.den == rhs.den {
            if self.den.is_one() {
                return Scalar::from_poly(&self.num + &rhs.num);
            }
            return Scalar::reduce(&self.num + &rhs.num, self.den.clone());
        }
        if self.den.is_one() {
            return Scalar {
                num: &(&self.num * &rhs.den) + &rhs.num,
                den: rhs.den.clone(),
            };
        }
        if rhs.den.is_one() {
            return Scalar {
                num: &self.num + &(&rhs.num * &self.den),
                den: self.den.clone(),
            };
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        Scalar::reduce(num, &self.den * &rhs.den)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        if rhs.is_zero() {
            return self.clone();
        }
        self + &(-rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Scalar::from_poly(&self.num * &rhs.num);
        }
        // cross-cancel so the product of reduced fractions stays reduced
        let g1 = if rhs.den.is_one() {
            Poly::one()
        } else {
            gcd(&self.num, &rhs.den)
        };
        let g2 = if self.den.is_one() {
            Poly::one()
        } else {
            gcd(&rhs.num, &self.den)
        };
        let a = self.num.div_exact(&g1).unwrap();
        let d = rhs.den.div_exact(&g1).unwrap();
        let c = rhs.num.div_exact(&g2).unwrap();
        let b = self.den.div_exact(&g2).unwrap();
        Scalar::normalize_lc(&a * &c, &b * &d)
    }
}

impl Div for &Scalar {
    type Output = Result<Scalar>;
    fn div(self, rhs: &Scalar) -> Result<Scalar> {
        Ok(self * &rhs.inv()?)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| &a + &b)
    }
}

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Scalar {
        Scalar::var(0)
    }

    #[test]
    fn quotient_rule() {
        let one = Scalar::one();
        let f = (&one / &(&one + &x())).unwrap();
        let expected = (&(-&one) / &(&one + &x()).pow(2)).unwrap();
        assert_eq!(f.derivative(0), expected);
    }

    #[test]
    fn fractions_reduce() {
        let y = Scalar::var(1);
        let s = &x() + &y;
        let q = (&s.pow(2) / &s).unwrap();
        assert_eq!(q, s);
        let r = (&(&x() * &y) / &(&y * &Scalar::from_int(2))).unwrap();
        assert_eq!(r, x().scale(&rational(1, 2)));
    }

    #[test]
    fn pole_detected() {
        let f = Scalar::one().inv().unwrap();
        assert_eq!(f, Scalar::one());
        let g = x().inv().unwrap();
        assert!(matches!(
            g.eval(&[rational(0, 1), rational(1, 1)]),
            Err(Error::Pole { .. })
        ));
    }

    #[test]
    fn division_by_zero() {
        assert_eq!(Scalar::zero().inv(), Err(Error::DivisionByZero));
    }
}
