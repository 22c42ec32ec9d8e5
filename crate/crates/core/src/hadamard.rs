//! Normalized Sylvester Hadamard matrices, applied through the fast
//! Walsh-Hadamard transform.
//!
//! `H_1 = [1]` and `H_{2d} = (1/sqrt 2) [[H_d, H_d], [H_d, -H_d]]`. The matrix is
//! symmetric and orthogonal, so the transform is an isometry and an involution.

use crate::error::{Error, Result};

/// Largest dimension the dense oracle will materialize.
pub const NAIVE_MAX_DIM: usize = 1 << 10;

pub(crate) fn check_power_of_two(len: usize, what: &str) -> Result<()> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::Dimension(format!(
            "{what} has length {len}, expected a power of two"
        )));
    }
    Ok(())
}

/// Largest power of two that is `<= n`. `n` must be positive.
pub fn prev_power_of_two(n: usize) -> usize {
    debug_assert!(n > 0);
    1 << n.ilog2()
}

/// Unnormalized in-place butterfly pass: computes `sqrt(d) * H_d * v`.
pub fn fwht_unnormalized_in_place(v: &mut [f64]) -> Result<()> {
    check_power_of_two(v.len(), "input vector")?;
    let n = v.len();
    let mut half = 1;
    while half < n {
        for chunk in v.chunks_exact_mut(2 * half) {
            let (lo, hi) = chunk.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half *= 2;
    }
    Ok(())
}

/// In-place `v <- H_d v`.
///
/// Runs the unnormalized butterflies and scales once by `1/sqrt(d)` at the end.
pub fn fwht_in_place(v: &mut [f64]) -> Result<()> {
    fwht_unnormalized_in_place(v)?;
    let n = v.len();
    if n > 1 {
        let scale = 1.0 / (n as f64).sqrt();
        v.iter_mut().for_each(|x| *x *= scale);
    }
    Ok(())
}

/// Out-of-place `H_d v`.
pub fn fwht(v: &[f64]) -> Result<Vec<f64>> {
    let mut out = v.to_vec();
    fwht_in_place(&mut out)?;
    Ok(out)
}

/// Dense `H_d`, row-major, built by the Sylvester recursion.
pub fn hadamard_matrix(d: usize) -> Result<Vec<Vec<f64>>> {
    check_power_of_two(d, "Hadamard dimension")?;
    if d > NAIVE_MAX_DIM {
        return Err(Error::Dimension(format!(
            "dense Hadamard oracle limited to d <= {NAIVE_MAX_DIM}, got {d}"
        )));
    }
    let mut h = vec![vec![1.0]];
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    while h.len() < d {
        let m = h.len();
        let mut next = vec![vec![0.0; 2 * m]; 2 * m];
        for i in 0..m {
            for j in 0..m {
                let x = h[i][j] * inv_sqrt2;
                next[i][j] = x;
                next[i][j + m] = x;
                next[i + m][j] = x;
                next[i + m][j + m] = -x;
            }
        }
        h = next;
    }
    Ok(h)
}

/// `H_d v` by explicit matrix construction and dense multiplication. O(d^2);
/// exists as an independent check on [`fwht`].
pub fn naive_hadamard_apply(v: &[f64]) -> Result<Vec<f64>> {
    let h = hadamard_matrix(v.len())?;
    Ok(h.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn unit_vector_d2() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(&fwht(&[1.0, 0.0]).unwrap(), &[s, s], 1e-15));
    }

    #[test]
    fn constant_vector_d4() {
        assert!(close(&fwht(&[1.0; 4]).unwrap(), &[2.0, 0.0, 0.0, 0.0], 1e-15));
    }

    #[test]
    fn d1_is_identity() {
        assert_eq!(fwht(&[3.5]).unwrap(), vec![3.5]);
        assert_eq!(naive_hadamard_apply(&[3.5]).unwrap(), vec![3.5]);
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(matches!(fwht(&[1.0, 2.0, 3.0]), Err(Error::Dimension(_))));
        assert!(matches!(fwht(&[]), Err(Error::Dimension(_))));
        assert!(matches!(
            naive_hadamard_apply(&[0.0; 6]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn h2_bottom_right_entry() {
        let h = hadamard_matrix(2).unwrap();
        assert!((h[1][1] + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn h4_is_kronecker_square_of_h2() {
        let h2 = hadamard_matrix(2).unwrap();
        let h4 = hadamard_matrix(4).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let kron = h2[i / 2][j / 2] * h2[i % 2][j % 2];
                assert!((h4[i][j] - kron).abs() < 1e-15, "({i},{j})");
            }
        }
    }

    #[test]
    fn matches_dense_oracle_up_to_256() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 0..=8 {
            let d = 1 << k;
            for _ in 0..5 {
                let v: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
                let fast = fwht(&v).unwrap();
                let slow = naive_hadamard_apply(&v).unwrap();
                assert!(close(&fast, &slow, 1e-9), "d={d}");
            }
        }
    }

    fn pow2_vec() -> impl Strategy<Value = Vec<f64>> {
        (0u32..=10).prop_flat_map(|k| prop::collection::vec(-1e3f64..1e3, 1usize << k))
    }

    proptest! {
        #[test]
        fn involution(v in pow2_vec()) {
            let back = fwht(&fwht(&v).unwrap()).unwrap();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
            let err = v.iter().zip(&back).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            prop_assert!(err / norm <= 1e-9 || norm < 1e-12);
        }

        #[test]
        fn isometry(v in pow2_vec()) {
            let n0 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let n1 = fwht(&v).unwrap().iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assert!((n0 - n1).abs() <= 1e-9 * n0.max(1e-12));
        }
    }
}
