//! Finite deduplicated matrix sets and their product-set calculus.
//!
//! A `GroupSet` keeps its elements sorted in the canonical matrix order,
//! so iteration, serialization and every greedy tie-break in the crate are
//! deterministic. Product operations either return a full exact result
//! within the configured growth cap or fail loudly; there is no silent
//! truncation.

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Element budget for any computed set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthCap {
    pub max_elements: usize,
}

impl GrowthCap {
    pub fn new(max_elements: usize) -> GrowthCap {
        GrowthCap { max_elements }
    }

    pub(crate) fn check(&self, len: usize, stage: &'static str) -> Result<()> {
        if len > self.max_elements {
            Err(Error::CapExceeded {
                stage,
                budget: self.max_elements,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for GrowthCap {
    fn default() -> GrowthCap {
        // A^N for N = 3*2^(n-1) - 2 explodes; loud failure beats silent
        // truncation since every downstream invariant assumes exact sets.
        GrowthCap {
            max_elements: 5_000_000,
        }
    }
}

/// A finite deduplicated set of invertible matrices of common dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSet {
    n: usize,
    elements: Vec<Matrix>, // sorted, unique
}

impl GroupSet {
    pub fn empty(n: usize) -> GroupSet {
        GroupSet {
            n,
            elements: vec![],
        }
    }

    pub fn from_matrices<I: IntoIterator<Item = Matrix>>(n: usize, it: I) -> Result<GroupSet> {
        let mut elements: Vec<Matrix> = Vec::new();
        for m in it {
            if m.dim() != n {
                return Err(Error::DimensionMismatch(n, m.dim()));
            }
            elements.push(m);
        }
        elements.sort_unstable();
        elements.dedup();
        Ok(GroupSet { n, elements })
    }

    pub fn singleton(m: Matrix) -> GroupSet {
        GroupSet {
            n: m.dim(),
            elements: vec![m],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = &Matrix> {
        self.elements.iter()
    }

    pub fn elements(&self) -> &[Matrix] {
        &self.elements
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        self.elements.binary_search(m).is_ok()
    }

    pub fn first(&self) -> Option<&Matrix> {
        self.elements.first()
    }

    pub fn contains_identity(&self) -> bool {
        self.contains(&Matrix::identity(self.n))
    }

    pub fn is_symmetric(&self) -> bool {
        self.elements.iter().all(|m| self.contains(&m.inv()))
    }

    pub fn is_subset_of(&self, other: &GroupSet) -> bool {
        self.elements.iter().all(|m| other.contains(m))
    }

    fn check_dim(&self, other: &GroupSet) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        Ok(())
    }

    /// {ab : a in A, b in B}, exact and deduplicated.
    pub fn product(&self, other: &GroupSet, cap: GrowthCap) -> Result<GroupSet> {
        self.check_dim(other)?;
        let mut seen: FxHashSet<Matrix> =
            FxHashSet::with_capacity_and_hasher(self.len().max(other.len()), Default::default());
        for a in &self.elements {
            for b in &other.elements {
                let p = a.mul(b)?;
                if seen.insert(p) {
                    cap.check(seen.len(), "product_set")?;
                }
            }
        }
        let mut elements: Vec<Matrix> = seen.into_iter().collect();
        elements.sort_unstable();
        Ok(GroupSet {
            n: self.n,
            elements,
        })
    }

    /// {a^-1 : a in A}.
    pub fn inverse(&self) -> GroupSet {
        let mut elements: Vec<Matrix> = self.elements.iter().map(|m| m.inv()).collect();
        elements.sort_unstable();
        GroupSet {
            n: self.n,
            elements,
        }
    }

    /// A^m by iterated products.
    pub fn power(&self, m: u32, cap: GrowthCap) -> Result<GroupSet> {
        if m == 0 {
            return Err(Error::Precondition("power requires m >= 1".into()));
        }
        let mut acc = self.clone();
        for _ in 1..m {
            acc = acc.product(self, cap)?;
        }
        Ok(acc)
    }

    /// The marked powers A^{m_1}, ..., A^{m_k} (marks strictly increasing)
    /// of an identity-containing set, computed by frontier layering: since
    /// id is in A the powers form an increasing chain, so each step only
    /// multiplies the newly discovered layer. Total cost is
    /// |A^{m_k}| * |A| products instead of one full product per step.
    pub fn increasing_powers(&self, marks: &[u32], cap: GrowthCap) -> Result<Vec<GroupSet>> {
        if !self.contains_identity() {
            return Err(Error::Precondition(
                "increasing_powers requires the identity in the set".into(),
            ));
        }
        if marks.is_empty() || marks[0] == 0 || marks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition(
                "marks must be strictly increasing and positive".into(),
            ));
        }
        let mut seen: FxHashSet<Matrix> = self.elements.iter().cloned().collect();
        let mut frontier: Vec<Matrix> = self.elements.clone();
        let mut out = Vec::with_capacity(marks.len());
        let mut k = 1u32;
        for (mi, &mark) in marks.iter().enumerate() {
            while k < mark {
                let mut next: Vec<Matrix> = Vec::new();
                for f in &frontier {
                    for s in &self.elements {
                        let p = f.mul(s)?;
                        if !seen.contains(&p) {
                            cap.check(seen.len() + 1, "increasing_powers")?;
                            seen.insert(p.clone());
                            next.push(p);
                        }
                    }
                }
                frontier = next;
                k += 1;
            }
            // the last snapshot consumes the accumulator to avoid holding
            // two copies of a possibly multi-million element set
            let mut elements: Vec<Matrix> = if mi + 1 == marks.len() {
                std::mem::take(&mut seen).into_iter().collect()
            } else {
                seen.iter().cloned().collect()
            };
            elements.sort_unstable();
            out.push(GroupSet {
                n: self.n,
                elements,
            });
        }
        Ok(out)
    }

    /// A^{+-m} = (A union A^-1)^m: each factor is an element of A or the
    /// inverse of one.
    pub fn pm_power(&self, m: u32, cap: GrowthCap) -> Result<GroupSet> {
        let sym = self.union(&self.inverse());
        sym.power(m, cap)
    }

    /// A union A^-1 union {id}.
    pub fn symmetrize(&self) -> GroupSet {
        let mut out = self.union(&self.inverse());
        let id = Matrix::identity(self.n);
        if let Err(pos) = out.elements.binary_search(&id) {
            out.elements.insert(pos, id);
        }
        out
    }

    pub fn union(&self, other: &GroupSet) -> GroupSet {
        debug_assert_eq!(self.n, other.n);
        let mut elements = Vec::with_capacity(self.len() + other.len());
        elements.extend_from_slice(&self.elements);
        elements.extend_from_slice(&other.elements);
        elements.sort_unstable();
        elements.dedup();
        GroupSet {
            n: self.n,
            elements,
        }
    }

    pub fn intersect(&self, other: &GroupSet) -> GroupSet {
        let elements = self
            .elements
            .iter()
            .filter(|m| other.contains(m))
            .cloned()
            .collect();
        GroupSet {
            n: self.n,
            elements,
        }
    }

    /// {a in A : member(a)}. The predicate is the caller's subgroup test;
    /// it is not verified here.
    pub fn filter<F: Fn(&Matrix) -> bool>(&self, member: F) -> GroupSet {
        let elements = self
            .elements
            .iter()
            .filter(|m| member(m))
            .cloned()
            .collect();
        GroupSet {
            n: self.n,
            elements,
        }
    }

    /// Left translate x * A.
    pub fn translate_left(&self, x: &Matrix) -> Result<GroupSet> {
        let mut elements = Vec::with_capacity(self.len());
        for a in &self.elements {
            elements.push(x.mul(a)?);
        }
        elements.sort_unstable();
        Ok(GroupSet {
            n: self.n,
            elements,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use crate::scalar::GaussianRational;
    use crate::testutil::{unip, unip_range};

    fn cap() -> GrowthCap {
        GrowthCap::default()
    }

    #[test]
    fn progression_products() {
        let a = unip_range(1);
        let aa = a.product(&a, cap()).unwrap();
        assert_eq!(aa, unip_range(2));
        assert_eq!(aa.len(), 5);
        assert_eq!(
            a.product(&GroupSet::singleton(Matrix::identity(2)), cap())
                .unwrap(),
            a
        );
    }

    #[test]
    fn subgroup_closure() {
        // {+-id, +-i*id} in 2x2
        let i = GaussianRational::I;
        let elems: Vec<Matrix> = [
            GaussianRational::ONE,
            GaussianRational::ONE.neg(),
            i.clone(),
            i.neg(),
        ]
        .iter()
        .map(|s| {
            Matrix::new(
                2,
                vec![
                    s.clone(),
                    GaussianRational::ZERO,
                    GaussianRational::ZERO,
                    s.clone(),
                ],
            )
            .unwrap()
        })
        .collect();
        let a = GroupSet::from_matrices(2, elems).unwrap();
        assert_eq!(a.product(&a, cap()).unwrap(), a);
    }

    #[test]
    fn inverse_and_symmetrize() {
        let single = GroupSet::singleton(unip(3));
        assert_eq!(single.inverse(), GroupSet::singleton(unip(-3)));
        let sym = single.symmetrize();
        assert_eq!(sym.len(), 3);
        assert!(sym.contains_identity());
        assert!(sym.is_symmetric());
        assert_eq!(GroupSet::empty(2).symmetrize().len(), 1);

        let diag: Vec<Matrix> = (0..=3)
            .map(|k| {
                Matrix::from_rows(&[&[&format!("{}", 1i64 << k), "0"], &["0", "1"]]).unwrap()
            })
            .collect();
        let d = GroupSet::from_matrices(2, diag).unwrap();
        let dinv = d.inverse();
        assert_eq!(dinv.len(), d.len());
        for k in 0..=3 {
            assert!(dinv.contains(
                &Matrix::from_rows(&[&[&format!("1/{}", 1i64 << k), "0"], &["0", "1"]]).unwrap()
            ));
        }
    }

    #[test]
    fn powers() {
        let a = GroupSet::from_matrices(2, [Matrix::identity(2), unip(1)]).unwrap();
        let a3 = a.power(3, cap()).unwrap();
        assert_eq!(
            a3,
            GroupSet::from_matrices(2, (0..=3).map(unip)).unwrap()
        );
        assert_eq!(a.power(1, cap()).unwrap(), a);
        // symmetric with id: A^{+-m} = A^m
        let s = unip_range(1);
        assert_eq!(s.pm_power(3, cap()).unwrap(), s.power(3, cap()).unwrap());
    }

    #[test]
    fn cap_fails_loudly() {
        let a = unip_range(5);
        let err = a.power(4, GrowthCap::new(10)).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }

    #[test]
    fn product_inverse_antihomomorphism() {
        let a = unip_range(2);
        let b = GroupSet::from_matrices(
            2,
            [
                Matrix::from_rows(&[&["2", "1"], &["0", "1"]]).unwrap(),
                Matrix::from_rows(&[&["1", "-1"], &["0", "3"]]).unwrap(),
            ],
        )
        .unwrap();
        let ab_inv = a.product(&b, cap()).unwrap().inverse();
        let binv_ainv = b.inverse().product(&a.inverse(), cap()).unwrap();
        assert_eq!(ab_inv, binv_ainv);
        assert_eq!(a.inverse().inverse(), a);
    }

    #[test]
    fn monotonicity_with_identity() {
        let a = unip_range(2);
        let a2 = a.power(2, cap()).unwrap();
        let a3 = a.power(3, cap()).unwrap();
        assert!(a.is_subset_of(&a2));
        assert!(a2.is_subset_of(&a3));
        let b = unip_range(3);
        assert!(a
            .power(2, cap())
            .unwrap()
            .is_subset_of(&b.power(2, cap()).unwrap()));
    }

    #[test]
    fn ruzsa_triangle_inequality_oracle() {
        // |A C^-1| |B| <= |A B^-1| |B C^-1| on assorted small sets
        use crate::testutil::random_upper;
        for seed in 0..20u64 {
            let a = GroupSet::from_matrices(
                3,
                (0..5).map(|k| random_upper(seed * 100 + k, 3)),
            )
            .unwrap();
            let b = GroupSet::from_matrices(
                3,
                (0..4).map(|k| random_upper(seed * 100 + 40 + k, 3)),
            )
            .unwrap();
            let c = GroupSet::from_matrices(
                3,
                (0..4).map(|k| random_upper(seed * 100 + 80 + k, 3)),
            )
            .unwrap();
            let aci = a.product(&c.inverse(), cap()).unwrap().len();
            let abi = a.product(&b.inverse(), cap()).unwrap().len();
            let bci = b.product(&c.inverse(), cap()).unwrap().len();
            assert!(aci * b.len() <= abi * bci);
        }
    }

    #[test]
    fn heisenberg_center_filter() {
        use crate::families::heisenberg_ball;
        let ball = heisenberg_ball(1, cap()).unwrap();
        assert_eq!(ball.len(), 7);
        let center = ball.filter(|m| m.entry(0, 1).is_zero() && m.entry(1, 2).is_zero());
        assert_eq!(center.len(), 3);
        assert!(center.contains_identity());
    }
}
