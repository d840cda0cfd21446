//! Exact linear algebra over arbitrary-precision integers.
//!
//! Determinants use fraction-free Gaussian elimination, so every
//! intermediate value stays integral and no rounding can occur.

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Computes the determinant of a square integer matrix.
///
/// Uses the Bareiss single-step elimination: after clearing column `k`,
/// every entry is divided by the previous pivot, and that division is
/// exact. Row swaps flip the sign of the result.
pub(crate) fn determinant(mat: &[Vec<BigInt>]) -> BigInt {
    let n = mat.len();
    if n == 0 {
        return BigInt::one();
    }
    debug_assert!(mat.iter().all(|row| row.len() == n));
    let mut m: Vec<Vec<BigInt>> = mat.to_vec();
    let mut sign = 1i8;
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Solves `mat * x = rhs` by Cramer's rule.
///
/// Returns the vector of column-replaced determinants together with
/// `det(mat)`, so the caller can decide whether each quotient is integral.
/// Returns `None` when the matrix is singular.
pub(crate) fn cramer_columns(mat: &[Vec<BigInt>], rhs: &[BigInt]) -> Option<(Vec<BigInt>, BigInt)> {
    let n = mat.len();
    debug_assert_eq!(rhs.len(), n);
    let det = determinant(mat);
    if det.is_zero() {
        return None;
    }
    let mut nums = Vec::with_capacity(n);
    for col in 0..n {
        let mut replaced = mat.to_vec();
        for (row, value) in replaced.iter_mut().zip(rhs) {
            row[col] = value.clone();
        }
        nums.push(determinant(&replaced));
    }
    Some((nums, det))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    /// Cofactor expansion along the first row, as an independent oracle.
    fn det_cofactor(mat: &[Vec<BigInt>]) -> BigInt {
        let n = mat.len();
        if n == 0 {
            return BigInt::one();
        }
        if n == 1 {
            return mat[0][0].clone();
        }
        let mut total = BigInt::zero();
        for col in 0..n {
            if mat[0][col].is_zero() {
                continue;
            }
            let minor: Vec<Vec<BigInt>> = mat[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(j, _)| j != col)
                        .map(|(_, v)| v.clone())
                        .collect()
                })
                .collect();
            let term = &mat[0][col] * det_cofactor(&minor);
            if col % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        total
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let cases = [
            m(&[&[3]]),
            m(&[&[1, 2], &[3, 4]]),
            m(&[&[0, 1], &[1, 0]]),
            m(&[&[2, 0, 1], &[0, 3, 0], &[1, 0, 2]]),
            m(&[&[0, 0, 5], &[0, 2, 1], &[7, 1, 1]]),
            m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]),
            m(&[
                &[2, -1, 0, 3],
                &[1, 1, 1, 1],
                &[0, 4, -2, 5],
                &[3, 0, 0, 1],
            ]),
        ];
        for mat in &cases {
            assert_eq!(determinant(mat), det_cofactor(mat));
        }
    }

    #[test]
    fn cramer_recovers_known_solution() {
        let mat = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let x = [BigInt::from(5), BigInt::from(-2), BigInt::from(7)];
        let rhs: Vec<BigInt> = (0..3)
            .map(|i| (0..3).map(|j| &mat[i][j] * &x[j]).sum())
            .collect();
        let (nums, det) = cramer_columns(&mat, &rhs).unwrap();
        for (num, expect) in nums.iter().zip(&x) {
            assert_eq!(num, &(expect * &det));
        }
    }

    #[test]
    fn cramer_rejects_singular_matrix() {
        let mat = m(&[&[1, 2], &[2, 4]]);
        let rhs = [BigInt::one(), BigInt::one()];
        assert!(cramer_columns(&mat, &rhs).is_none());
    }
}
