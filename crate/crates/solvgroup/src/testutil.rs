//! Shared helpers for unit tests.

use crate::matrix::Matrix;
use crate::scalar::GaussianRational;
use crate::set::GroupSet;

/// 2x2 unipotent matrix with upper-right entry k.
pub(crate) fn unip(k: i64) -> Matrix {
    Matrix::from_rows(&[&["1", &k.to_string()], &["0", "1"]]).unwrap()
}

/// The unipotent progression {unip(k) : |k| <= l}.
pub(crate) fn unip_range(l: i64) -> GroupSet {
    GroupSet::from_matrices(2, (-l..=l).map(unip)).unwrap()
}

/// Small deterministic pseudo-random upper-triangular invertible matrix.
/// The families module has the real seeded generator; this one is just for
/// in-crate property tests.
pub(crate) fn random_upper(seed: u64, n: usize) -> Matrix {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
    let mut next = || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 33) as i64
    };
    let pool = ["1", "2", "-1", "1/2", "-2", "3"];
    let mut entries = vec![GaussianRational::ZERO; n * n];
    for i in 0..n {
        for j in i..n {
            let v = next().unsigned_abs() as usize % pool.len();
            entries[i * n + j] = if i == j || next() % 2 == 0 {
                pool[v].parse().unwrap()
            } else {
                GaussianRational::ZERO
            };
        }
    }
    Matrix::new(n, entries).unwrap()
}
