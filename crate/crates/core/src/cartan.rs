//! Cartan calculus on a coordinate patch: vector fields, 1-forms and 2-forms
//! as component vectors in the coordinate frames.

use crate::bundle::section::{self, Sec};
use crate::scalar::Scalar;

/// Antisymmetric `dim × dim` matrix.
pub type TwoForm = Vec<Vec<Scalar>>;

/// `X(f) = Σ X^i ∂_i f`.
pub fn apply_vf(x: &[Scalar], f: &Scalar) -> Scalar {
    if f.constant_value().is_some() {
        return Scalar::zero();
    }
    x.iter()
        .enumerate()
        .filter(|(_, xi)| !xi.is_zero())
        .map(|(i, xi)| xi * &f.derivative(i))
        .sum()
}

/// `[X,Y]^i = Σ_j (X^j ∂_j Y^i − Y^j ∂_j X^i)`.
pub fn lie_bracket_vf(x: &[Scalar], y: &[Scalar]) -> Sec {
    x.iter()
        .zip(y)
        .map(|(xi, yi)| &apply_vf(x, yi) - &apply_vf(y, xi))
        .collect()
}

pub fn d_function(f: &Scalar, dim: usize) -> Sec {
    (0..dim).map(|i| f.derivative(i)).collect()
}

/// `(dθ)_{ij} = ∂_i θ_j − ∂_j θ_i`.
pub fn d_oneform(theta: &[Scalar]) -> TwoForm {
    let n = theta.len();
    let mut w = vec![vec![Scalar::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = &theta[j].derivative(i) - &theta[i].derivative(j);
            w[j][i] = -&v;
            w[i][j] = v;
        }
    }
    w
}

/// `(i_X ω)_j = Σ_i X^i ω_{ij}`.
pub fn interior_vf_2form(x: &[Scalar], w: &TwoForm) -> Sec {
    let n = x.len();
    let mut out = section::zero(n);
    for (i, xi) in x.iter().enumerate() {
        section::axpy(&mut out, xi, &w[i]);
    }
    out
}

pub fn pair_form_vf(theta: &[Scalar], x: &[Scalar]) -> Scalar {
    section::dot(theta, x)
}

/// `ℒ_X θ = i_X dθ + d(θ(X))`.
pub fn lie_derivative_1form(x: &[Scalar], theta: &[Scalar]) -> Sec {
    let n = x.len();
    let a = interior_vf_2form(x, &d_oneform(theta));
    let b = d_function(&pair_form_vf(theta, x), n);
    section::add(&a, &b)
}

/// `i_Y dθ`, the term of the Courant–Dorfman bracket.
pub fn contract_d(y: &[Scalar], theta: &[Scalar]) -> Sec {
    interior_vf_2form(y, &d_oneform(theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::Patch;

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
    fn bracket_examples() {
        assert_eq!(lie_bracket_vf(&v("1", "0"), &v("0", "1")), v("0", "0"));
        assert_eq!(lie_bracket_vf(&v("0", "x"), &v("1", "0")), v("0", "-1"));
    }

    #[test]
    fn d_examples() {
        assert_eq!(d_function(&e("x*y"), 2), v("y", "x"));
        let w = d_oneform(&v("0", "x"));
        assert_eq!(w[0][1], e("1"));
        assert_eq!(w[1][0], e("-1"));
        assert_eq!(lie_derivative_1form(&v("0", "x"), &v("0", "1")), v("1", "0"));
    }
}
