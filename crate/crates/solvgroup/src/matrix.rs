//! Exact invertible matrices over the Gaussian rationals, with the
//! structural maps of the upper-triangular group: the two corner
//! homomorphisms, the corner subgroup of matrices `id + lambda*E_{1n}`,
//! and diagonal ratios.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::GaussianRational;

/// An n-by-n invertible matrix with exact entries, stored row-major.
///
/// Equality, hashing and ordering are entry-wise on canonical scalars, so
/// two matrices are equal iff they are mathematically equal. The ordering
/// (dimension first, then entries lexicographically by value) is the
/// canonical order used for all deterministic tie-breaking in this crate.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    n: usize,
    entries: Box<[GaussianRational]>,
}

impl PartialOrd for Matrix {
    fn partial_cmp(&self, other: &Matrix) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Matrix {
    fn cmp(&self, other: &Matrix) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.entries.cmp(&other.entries))
    }
}

impl Matrix {
    /// Build a matrix from row-major entries, checking invertibility.
    pub fn new(n: usize, entries: Vec<GaussianRational>) -> Result<Matrix> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::Precondition(format!(
                "expected {n}x{n} entries, got {}",
                entries.len()
            )));
        }
        let m = Matrix {
            n,
            entries: entries.into_boxed_slice(),
        };
        if m.determinant().is_zero() {
            return Err(Error::Singular);
        }
        Ok(m)
    }

    /// Internal constructor for results already known to be invertible
    /// (products, inverses, conjugates of invertible matrices).
    pub(crate) fn new_unchecked(n: usize, entries: Vec<GaussianRational>) -> Matrix {
        debug_assert_eq!(entries.len(), n * n);
        Matrix {
            n,
            entries: entries.into_boxed_slice(),
        }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut entries = vec![GaussianRational::ZERO; n * n];
        for i in 0..n {
            entries[i * n + i] = GaussianRational::ONE;
        }
        Matrix {
            n,
            entries: entries.into_boxed_slice(),
        }
    }

    /// Convenience constructor from rows of human-readable scalar strings.
    pub fn from_rows(rows: &[&[&str]]) -> Result<Matrix> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::Precondition("ragged rows".into()));
            }
            for s in *row {
                entries.push(s.parse()?);
            }
        }
        Matrix::new(n, entries)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &GaussianRational {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[GaussianRational] {
        &self.entries
    }

    pub fn is_identity(&self) -> bool {
        *self == Matrix::identity(self.n)
    }

    pub fn is_upper_triangular(&self) -> bool {
        for i in 1..self.n {
            for j in 0..i {
                if !self.entry(i, j).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_diagonal(&self) -> bool {
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j && !self.entry(i, j).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Upper triangular with unit diagonal.
    pub fn is_unitriangular(&self) -> bool {
        self.is_upper_triangular() && (0..self.n).all(|i| self.entry(i, i).is_one())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = GaussianRational::ZERO;
                for k in 0..n {
                    let a = self.entry(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    let b = other.entry(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    acc = acc.add(&a.mul(b));
                }
                entries.push(acc);
            }
        }
        Ok(Matrix::new_unchecked(n, entries))
    }

    /// Exact determinant by fraction-full Gaussian elimination.
    pub fn determinant(&self) -> GaussianRational {
        let n = self.n;
        let mut work: Vec<GaussianRational> = self.entries.to_vec();
        let mut det = GaussianRational::ONE;
        for col in 0..n {
            let pivot_row = match (col..n).find(|&r| !work[r * n + col].is_zero()) {
                Some(r) => r,
                None => return GaussianRational::ZERO,
            };
            if pivot_row != col {
                for j in 0..n {
                    work.swap(pivot_row * n + j, col * n + j);
                }
                det = det.neg();
            }
            let pivot = work[col * n + col].clone();
            det = det.mul(&pivot);
            let inv = pivot.inverse().expect("pivot nonzero");
            for r in col + 1..n {
                let factor = work[r * n + col].mul(&inv);
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    let sub = factor.mul(&work[col * n + j]);
                    work[r * n + j] = work[r * n + j].sub(&sub);
                }
            }
        }
        det
    }

    /// Exact inverse by Gauss-Jordan elimination. The invertibility type
    /// invariant makes this total.
    pub fn inv(&self) -> Matrix {
        let n = self.n;
        let mut work: Vec<GaussianRational> = self.entries.to_vec();
        let mut out = Matrix::identity(n).entries.to_vec();
        for col in 0..n {
            let pivot_row = (col..n)
                .find(|&r| !work[r * n + col].is_zero())
                .expect("invertible by invariant");
            if pivot_row != col {
                for j in 0..n {
                    work.swap(pivot_row * n + j, col * n + j);
                    out.swap(pivot_row * n + j, col * n + j);
                }
            }
            let inv = work[col * n + col].inverse().expect("pivot nonzero");
            for j in 0..n {
                work[col * n + j] = work[col * n + j].mul(&inv);
                out[col * n + j] = out[col * n + j].mul(&inv);
            }
            for r in 0..n {
                if r == col || work[r * n + col].is_zero() {
                    continue;
                }
                let factor = work[r * n + col].clone();
                for j in 0..n {
                    let w = factor.mul(&work[col * n + j]);
                    work[r * n + j] = work[r * n + j].sub(&w);
                    let o = factor.mul(&out[col * n + j]);
                    out[r * n + j] = out[r * n + j].sub(&o);
                }
            }
        }
        Matrix::new_unchecked(n, out)
    }

    /// Commutator [g, h] = g h g^-1 h^-1.
    pub fn commutator(&self, other: &Matrix) -> Result<Matrix> {
        self.mul(other)?.mul(&self.inv())?.mul(&other.inv())
    }

    fn require_upper_triangular(&self) -> Result<()> {
        if self.is_upper_triangular() {
            Ok(())
        } else {
            Err(Error::NotUpperTriangular)
        }
    }

    /// The corner homomorphism deleting the last row and column.
    pub fn pi_project(&self) -> Result<Matrix> {
        self.require_upper_triangular()?;
        if self.n < 2 {
            return Err(Error::DimensionTooSmall(self.n));
        }
        let m = self.n - 1;
        let mut entries = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                entries.push(self.entry(i, j).clone());
            }
        }
        Ok(Matrix::new_unchecked(m, entries))
    }

    /// The corner homomorphism deleting the first row and column.
    pub fn pi_prime_project(&self) -> Result<Matrix> {
        self.require_upper_triangular()?;
        if self.n < 2 {
            return Err(Error::DimensionTooSmall(self.n));
        }
        let m = self.n - 1;
        let mut entries = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                entries.push(self.entry(i + 1, j + 1).clone());
            }
        }
        Ok(Matrix::new_unchecked(m, entries))
    }

    /// id + lambda * E_{1n}.
    pub fn corner_make(lambda: &GaussianRational, n: usize) -> Result<Matrix> {
        if n < 2 {
            return Err(Error::DimensionTooSmall(n));
        }
        let mut m = Matrix::identity(n);
        m.entries[n - 1] = lambda.clone();
        Ok(m)
    }

    /// Returns lambda when the matrix has the `id + lambda*E_{1n}` support
    /// pattern (the kernel of both corner homomorphisms), `None` otherwise.
    pub fn corner_extract(&self) -> Option<GaussianRational> {
        let n = self.n;
        if n < 2 {
            return None;
        }
        for i in 0..n {
            for j in 0..n {
                let e = self.entry(i, j);
                if i == j {
                    if !e.is_one() {
                        return None;
                    }
                } else if !(i == 0 && j == n - 1) && !e.is_zero() {
                    return None;
                }
            }
        }
        Some(self.entry(0, n - 1).clone())
    }

    /// x_11 / x_nn for an upper-triangular matrix.
    pub fn diag_ratio(&self) -> Result<GaussianRational> {
        self.require_upper_triangular()?;
        self.entry(0, 0).div(self.entry(self.n - 1, self.n - 1))
    }

    /// g -> x g x^-1.
    pub fn conjugate_by(&self, x: &Matrix) -> Result<Matrix> {
        x.mul(self)?.mul(&x.inv())
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.entry(i, j))?;
            }
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[&str]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    pub(crate) fn gq(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    #[test]
    fn unipotent_addition_law() {
        let a = m(&[&["1", "3"], &["0", "1"]]);
        let b = m(&[&["1", "-1"], &["0", "1"]]);
        assert_eq!(a.mul(&b).unwrap(), m(&[&["1", "2"], &["0", "1"]]));
        assert_eq!(a.mul(&Matrix::identity(2)).unwrap(), a);
        assert_eq!(a.inv(), m(&[&["1", "-3"], &["0", "1"]]));
    }

    #[test]
    fn corner_addition_law() {
        let a = Matrix::corner_make(&gq("2"), 3).unwrap();
        let b = Matrix::corner_make(&gq("5"), 3).unwrap();
        assert_eq!(
            a.mul(&b).unwrap(),
            Matrix::corner_make(&gq("7"), 3).unwrap()
        );
        assert_eq!(a.inv(), Matrix::corner_make(&gq("-2"), 3).unwrap());
        assert_eq!(Matrix::identity(3).corner_extract().unwrap(), gq("0"));
        let e12 = m(&[&["1", "1", "0"], &["0", "1", "0"], &["0", "0", "1"]]);
        assert_eq!(e12.corner_extract(), None);
        assert_eq!(
            Matrix::corner_make(&gq("7"), 3).unwrap().corner_extract(),
            Some(gq("7"))
        );
    }

    #[test]
    fn diag_inverse() {
        let d = m(&[&["2", "0"], &["0", "1/2"]]);
        assert_eq!(d.inv(), m(&[&["1/2", "0"], &["0", "2"]]));
    }

    #[test]
    fn singular_rejected() {
        assert!(matches!(
            Matrix::from_rows(&[&["1", "2"], &["2", "4"]]),
            Err(Error::Singular)
        ));
    }

    #[test]
    fn commutators() {
        let x = m(&[&["1", "1", "0"], &["0", "1", "0"], &["0", "0", "1"]]);
        let y = m(&[&["1", "0", "0"], &["0", "1", "1"], &["0", "0", "1"]]);
        let z = m(&[&["1", "0", "1"], &["0", "1", "0"], &["0", "0", "1"]]);
        assert_eq!(x.commutator(&y).unwrap(), z);
        let g = m(&[&["2", "0"], &["0", "1"]]);
        let h = m(&[&["1", "1"], &["0", "1"]]);
        assert_eq!(g.commutator(&h).unwrap(), h);
        let d1 = m(&[&["2", "0"], &["0", "3"]]);
        let d2 = m(&[&["5", "0"], &["0", "7"]]);
        assert!(d1.commutator(&d2).unwrap().is_identity());
    }

    #[test]
    fn projections() {
        let g = m(&[&["1", "2", "3"], &["0", "4", "5"], &["0", "0", "6"]]);
        assert_eq!(g.pi_project().unwrap(), m(&[&["1", "2"], &["0", "4"]]));
        assert_eq!(
            g.pi_prime_project().unwrap(),
            m(&[&["4", "5"], &["0", "6"]])
        );
        assert_eq!(
            Matrix::identity(4).pi_project().unwrap(),
            Matrix::identity(3)
        );
        let lower = m(&[&["1", "0"], &["1", "1"]]);
        assert!(matches!(lower.pi_project(), Err(Error::NotUpperTriangular)));
    }

    #[test]
    fn diag_ratio_examples() {
        let d = m(&[
            &["2", "0", "0"],
            &["0", "1", "0"],
            &["0", "0", "4"],
        ]);
        assert_eq!(d.diag_ratio().unwrap(), gq("1/2"));
        let u = m(&[&["1", "5"], &["0", "1"]]);
        assert_eq!(u.diag_ratio().unwrap(), gq("1"));
    }

    #[test]
    fn conjugation_moves_corner_by_diag_ratio() {
        // y m_lambda y^-1 = m_{t lambda} with t = y_11/y_nn, exact.
        let cases: &[(&[&[&str]], &str)] = &[
            (&[&["2", "1", "7"], &["0", "-3", "1/2"], &["0", "0", "5"]], "3"),
            (&[&["1/2", "0", "1"], &["0", "1", "0"], &["0", "0", "4"]], "-2"),
        ];
        for (rows, lam) in cases {
            let y = m(rows);
            let lambda = gq(lam);
            let t = y.diag_ratio().unwrap();
            let conj = Matrix::corner_make(&lambda, 3)
                .unwrap()
                .conjugate_by(&y)
                .unwrap();
            assert_eq!(
                conj,
                Matrix::corner_make(&t.mul(&lambda), 3).unwrap()
            );
        }
    }

    proptest::proptest! {
        #[test]
        fn group_axioms(seed in 0u64..500) {
            use crate::testutil::random_upper;
            let g = random_upper(seed, 3);
            let h = random_upper(seed.wrapping_add(1000), 3);
            let k = random_upper(seed.wrapping_add(2000), 3);
            proptest::prop_assert_eq!(g.mul(&h).unwrap().mul(&k).unwrap(),
                                      g.mul(&h.mul(&k).unwrap()).unwrap());
            proptest::prop_assert!(g.mul(&g.inv()).unwrap().is_identity());
            // pi and pi' are homomorphisms
            proptest::prop_assert_eq!(
                g.mul(&h).unwrap().pi_project().unwrap(),
                g.pi_project().unwrap().mul(&h.pi_project().unwrap()).unwrap());
            proptest::prop_assert_eq!(
                g.mul(&h).unwrap().pi_prime_project().unwrap(),
                g.pi_prime_project().unwrap().mul(&h.pi_prime_project().unwrap()).unwrap());
        }
    }

}
