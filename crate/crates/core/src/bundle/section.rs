//! Sections of trivial bundles as component vectors.

use crate::scalar::Scalar;

/// Components of a section in the standard frame of its bundle.
pub type Sec = Vec<Scalar>;

pub fn zero(len: usize) -> Sec {
    vec![Scalar::zero(); len]
}

pub fn basis(len: usize, i: usize) -> Sec {
    let mut v = zero(len);
    v[i] = Scalar::one();
    v
}

pub fn standard_frame(len: usize) -> Vec<Sec> {
    (0..len).map(|i| basis(len, i)).collect()
}

pub fn add(a: &[Scalar], b: &[Scalar]) -> Sec {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Scalar], b: &[Scalar]) -> Sec {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn neg(a: &[Scalar]) -> Sec {
    a.iter().map(|x| -x).collect()
}

pub fn scale(f: &Scalar, a: &[Scalar]) -> Sec {
    if f.is_zero() {
        return zero(a.len());
    }
    if f.is_one() {
        return a.to_vec();
    }
    a.iter().map(|x| f * x).collect()
}

pub fn add_assign(a: &mut [Scalar], b: &[Scalar]) {
    for (x, y) in a.iter_mut().zip(b) {
        if !y.is_zero() {
            *x = &*x + y;
        }
    }
}

pub fn sub_assign(a: &mut [Scalar], b: &[Scalar]) {
    for (x, y) in a.iter_mut().zip(b) {
        if !y.is_zero() {
            *x = &*x - y;
        }
    }
}

/// `a += f * b`
pub fn axpy(a: &mut [Scalar], f: &Scalar, b: &[Scalar]) {
    if f.is_zero() {
        return;
    }
    for (x, y) in a.iter_mut().zip(b) {
        if !y.is_zero() {
            *x = &*x + &(f * y);
        }
    }
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

pub fn is_zero(a: &[Scalar]) -> bool {
    a.iter().all(Scalar::is_zero)
}

pub fn concat(a: &[Scalar], b: &[Scalar]) -> Sec {
    let mut v = a.to_vec();
    v.extend_from_slice(b);
    v
}

/// Linear combination `Σ c_i v_i`.
pub fn combine(coeffs: &[Scalar], vectors: &[Sec], len: usize) -> Sec {
    let mut out = zero(len);
    for (c, v) in coeffs.iter().zip(vectors) {
        axpy(&mut out, c, v);
    }
    out
}
