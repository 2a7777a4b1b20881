//! Linear algebra over the rational-function field.
//!
//! Pivots are always chosen at the lowest available index so that every
//! result (nullspace bases, certificates, witnesses) is reproducible.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type Mat = Vec<Vec<Scalar>>;

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(m: &mut Mat, ncols: usize) -> Vec<usize> {
    let nrows = m.len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == nrows {
            break;
        }
        let Some(p) = (row..nrows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].inv().expect("pivot is nonzero");
        if !inv.is_one() {
            for c in col..ncols {
                if !m[row][c].is_zero() {
                    m[row][c] = &m[row][c] * &inv;
                }
            }
        }
        for i in 0..nrows {
            if i == row || m[i][col].is_zero() {
                continue;
            }
            let f = m[i][col].clone();
            for c in col..ncols {
                if !m[row][c].is_zero() {
                    let t = &f * &m[row][c];
                    m[i][c] = &m[i][c] - &t;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Basis of `{x : rows · x = 0}`, one vector per free column in index order.
pub fn nullspace(rows: &[Vec<Scalar>], ncols: usize) -> Vec<Vec<Scalar>> {
    let mut m: Mat = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Scalar::zero(); ncols];
        v[free] = Scalar::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -&m[r][free];
        }
        basis.push(v);
    }
    basis
}

pub fn rank(vectors: &[Vec<Scalar>], len: usize) -> usize {
    let mut m: Mat = vectors.to_vec();
    rref(&mut m, len).len()
}

pub fn det(m: &Mat) -> Scalar {
    let n = m.len();
    let mut a = m.clone();
    let mut d = Scalar::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !a[i][col].is_zero()) else {
            return Scalar::zero();
        };
        if p != col {
            a.swap(p, col);
            d = -d;
        }
        d = &d * &a[col][col];
        let inv = a[col][col].inv().unwrap();
        for i in col + 1..n {
            if a[i][col].is_zero() {
                continue;
            }
            let f = &a[i][col] * &inv;
            for c in col..n {
                if !a[col][c].is_zero() {
                    let t = &f * &a[col][c];
                    a[i][c] = &a[i][c] - &t;
                }
            }
        }
    }
    d
}

pub fn inverse(m: &Mat) -> Result<Mat> {
    let n = m.len();
    let mut aug: Mat = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Err(Error::RankDrop("singular matrix".into()));
    }
    Ok(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_vec(m: &Mat, v: &[Scalar]) -> Vec<Scalar> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect()
}

pub fn transpose(m: &Mat, ncols: usize) -> Mat {
    (0..ncols)
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

/// Rank certificate for linearly independent vectors: the lowest-index set
/// of coordinates on which they restrict to an invertible square matrix,
/// together with that minor's determinant.
pub fn rank_certificate(vectors: &[Vec<Scalar>], len: usize) -> Result<(Vec<usize>, Scalar)> {
    let k = vectors.len();
    if k == 0 {
        return Ok((Vec::new(), Scalar::one()));
    }
    // eliminate on the transpose: rows are vectors, columns coordinates
    let mut m: Mat = vectors.to_vec();
    let pivots = rref(&mut m, len);
    if pivots.len() < k {
        return Err(Error::RankDrop(format!("{k} vectors span only rank {}", pivots.len())));
    }
    let minor: Mat = vectors
        .iter()
        .map(|v| pivots.iter().map(|&i| v[i].clone()).collect())
        .collect();
    let d = det(&minor);
    debug_assert!(!d.is_zero());
    Ok((pivots, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(c: i64) -> Scalar {
        Scalar::from_int(c)
    }

    #[test]
    fn nullspace_of_rank_one() {
        let rows = vec![vec![s(1), s(2), s(3)]];
        let ns = nullspace(&rows, 3);
        assert_eq!(ns, vec![vec![s(-2), s(1), s(0)], vec![s(-3), s(0), s(1)]]);
    }

    #[test]
    fn inverse_round_trip() {
        let x = Scalar::var(0);
        let m = vec![vec![s(1), x.clone()], vec![s(0), s(2)]];
        let inv = inverse(&m).unwrap();
        let e0 = mat_vec(&m, &mat_vec(&inv, &[s(1), s(0)]));
        assert_eq!(e0, vec![s(1), s(0)]);
        assert_eq!(det(&m), s(2));
    }

    #[test]
    fn certificate_detects_dependence() {
        let x = Scalar::var(0);
        let v1 = vec![s(1), x.clone()];
        let v2 = vec![x.clone(), &x * &x];
        assert!(rank_certificate(&[v1.clone(), v2], 2).is_err());
        let (rows, d) = rank_certificate(&[v1], 2).unwrap();
        assert_eq!(rows, vec![0]);
        assert_eq!(d, s(1));
    }
}
