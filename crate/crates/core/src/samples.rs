//! Named sample seeds and generators for compatible pairs.
//!
//! The rank-two samples share the form `[[0,1],[-1,0]]` and differ in the
//! exchange matrix, giving the classical pentagon, hexagon and octagon
//! mutation classes. The principal-coefficient construction doubles the
//! directions, freezing one companion per exchangeable index, and is
//! integrally compatible for every skew-symmetrizable principal part.

use std::sync::Arc;

use rand::Rng;

use crate::cyclotomic::RootContext;
use crate::error::EngineError;
use crate::seeds::{ExchangeMatrix, Seed};
use crate::torus::SkewForm;

fn rank_two(ell: u64, lower_left: i64) -> Result<Seed, EngineError> {
    let ctx = RootContext::new(ell)?;
    let lambda = SkewForm::from_lift(&ctx, vec![vec![0, 1], vec![-1, 0]])?;
    let btilde = ExchangeMatrix::new(
        2,
        vec![0, 1],
        vec![vec![0, 1], vec![lower_left, 0]],
    )?;
    Seed::standard(&lambda, btilde, vec![])
}

/// Rank two, symmetric: five seeds in the mutation class.
pub fn a2(ell: u64) -> Result<Seed, EngineError> {
    rank_two(ell, -1)
}

/// Rank two with diagonal `(2, 1)`: six seeds in the mutation class.
pub fn b2(ell: u64) -> Result<Seed, EngineError> {
    rank_two(ell, -2)
}

/// Rank two with diagonal `(3, 1)`: eight seeds in the mutation class.
pub fn g2(ell: u64) -> Result<Seed, EngineError> {
    rank_two(ell, -3)
}

/// Two disconnected exchangeable directions with principal coefficients:
/// four seeds in the mutation class.
pub fn a1a1_principal(ell: u64) -> Result<Seed, EngineError> {
    let ctx = RootContext::new(ell)?;
    principal_pair(&ctx, &[vec![0, 0], vec![0, 0]], &[1, 1])
}

/// The seed with principal coefficients over a skew-symmetrizable
/// principal part `b` with symmetrizer `d`: the exchange matrix stacks
/// the identity under `b`, and the form pairs each direction with its
/// frozen companion through `d`.
pub fn principal_pair(
    ctx: &Arc<RootContext>,
    b: &[Vec<i64>],
    d: &[u64],
) -> Result<Seed, EngineError> {
    let n = b.len();
    if d.len() != n {
        return Err(EngineError::DimensionMismatch {
            expected: n,
            got: d.len(),
        });
    }
    for (i, row) in b.iter().enumerate() {
        if row.len() != n {
            return Err(EngineError::DimensionMismatch {
                expected: n,
                got: row.len(),
            });
        }
        for (j, &bij) in row.iter().enumerate() {
            if d[i] as i64 * bij != -(d[j] as i64) * b[j][i] {
                return Err(EngineError::Incompatible(format!(
                    "d does not symmetrize b at ({i},{j})"
                )));
            }
        }
    }

    let total = 2 * n;
    let mut entries = vec![vec![0i64; n]; total];
    for (i, row) in b.iter().enumerate() {
        entries[i].clone_from_slice(row);
    }
    for j in 0..n {
        entries[n + j][j] = 1;
    }
    let btilde = ExchangeMatrix::new(total, (0..n).collect(), entries)?;

    let mut lambda = vec![vec![0i64; total]; total];
    for j in 0..n {
        lambda[n + j][j] = d[j] as i64;
        lambda[j][n + j] = -(d[j] as i64);
        for i in 0..n {
            if i != j {
                lambda[n + j][n + i] = d[i] as i64 * b[i][j];
            }
        }
    }
    let form = SkewForm::from_lift(ctx, lambda)?;
    Seed::standard(&form, btilde, vec![])
}

/// The fully frozen seed whose generators quasi-commute with pairing one:
/// `x_i x_j = zeta^2 x_j x_i` for `i < j`. There are no exchangeable
/// directions, so the mutation class is a single seed.
pub fn skew_poly(ell: u64, n: usize) -> Result<Seed, EngineError> {
    let ctx = RootContext::new(ell)?;
    let mut lambda = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i < j {
                lambda[i][j] = 1;
            } else if i > j {
                lambda[i][j] = -1;
            }
        }
    }
    let form = SkewForm::from_lift(&ctx, lambda)?;
    let btilde = ExchangeMatrix::new(n, vec![], vec![vec![]; n])?;
    Seed::standard(&form, btilde, vec![])
}

/// A random skew-symmetrizable matrix together with its symmetrizer:
/// entries above the diagonal are `c * d_j` and below are `-c * d_i` for
/// small random `c`.
pub fn random_skew_symmetrizable<R: Rng>(rng: &mut R, n: usize) -> (Vec<Vec<i64>>, Vec<u64>) {
    let d: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
    let mut b = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let c = rng.gen_range(-2i64..=2);
            b[i][j] = c * d[j] as i64;
            b[j][i] = -c * d[i] as i64;
        }
    }
    (b, d)
}

/// A random seed with principal coefficients at the given order.
pub fn random_principal_seed<R: Rng>(
    ctx: &Arc<RootContext>,
    rng: &mut R,
    n: usize,
) -> Result<Seed, EngineError> {
    let (b, d) = random_skew_symmetrizable(rng, n);
    principal_pair(ctx, &b, &d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn named_samples_have_expected_diagonals() {
        let a2 = a2(5).unwrap();
        assert_eq!(a2.compatibility().diagonal, vec![1, 1]);
        assert!(a2.compatibility().coprime);

        let b2_odd = b2(5).unwrap();
        assert_eq!(b2_odd.compatibility().diagonal, vec![2, 1]);
        assert!(b2_odd.compatibility().coprime);

        let b2_even = b2(4).unwrap();
        assert!(!b2_even.compatibility().coprime);

        let g2_bad = g2(9).unwrap();
        assert_eq!(g2_bad.compatibility().diagonal, vec![3, 1]);
        assert!(!g2_bad.compatibility().coprime);

        let g2_good = g2(5).unwrap();
        assert!(g2_good.compatibility().coprime);

        let square = a1a1_principal(3).unwrap();
        assert_eq!(square.compatibility().diagonal, vec![1, 1]);
        assert!(square.compatibility().coprime);
    }

    #[test]
    fn principal_pairs_are_compatible_for_random_principal_parts() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for ell in [3u64, 5, 9] {
            let ctx = RootContext::new(ell).unwrap();
            for n in 2..=4 {
                for _ in 0..5 {
                    let seed = random_principal_seed(&ctx, &mut rng, n).unwrap();
                    assert_eq!(seed.dim(), 2 * n);
                    assert!(seed.compatibility().diagonal.iter().all(|&d| d > 0));
                }
            }
        }
    }

    #[test]
    fn skew_poly_seeds_are_fully_frozen_and_coprime_at_odd_orders() {
        let seed = skew_poly(3, 2).unwrap();
        assert_eq!(seed.dim(), 2);
        assert!(seed.exchangeable().is_empty());
        assert!(seed.compatibility().coprime);
        let x1 = &seed.frame()[0];
        let x2 = &seed.frame()[1];
        let zeta = crate::cyclotomic::CyclotomicInteger::zeta_power(seed.context(), 2);
        assert_eq!(x1.mul_ref(x2), x2.mul_ref(x1).scale(&zeta));

        let single = skew_poly(5, 1).unwrap();
        assert_eq!(single.dim(), 1);
        assert!(single.compatibility().coprime);
    }

    #[test]
    fn principal_pair_rejects_a_non_symmetrizing_d() {
        let ctx = RootContext::new(5).unwrap();
        let b = vec![vec![0, 2], vec![-1, 0]];
        assert!(principal_pair(&ctx, &b, &[1, 1]).is_err());
        assert!(principal_pair(&ctx, &b, &[1, 2]).is_ok());
    }
}
