//! Nested commutators, nilpotency-step certification over generator
//! tuples, and bounded word-ball closure.
//!
//! Convention: [g, h] = g h g^-1 h^-1, and "step s" is the length of the
//! lower central series, so abelian groups have step 1. The step check
//! only ever evaluates nested commutators of generators — never of all
//! group elements — which keeps it finite; levels are deduplicated by
//! value so repeated tails are evaluated once.

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::set::{GroupSet, GrowthCap};

/// Default bound on commutator evaluations in `nilpotency_step`.
pub const DEFAULT_TUPLE_BUDGET: usize = 10_000_000;

/// Right-nested commutator [c_1, [c_2, [... [c_{k-1}, c_k] ...]]].
pub fn nested_commutator(chain: &[Matrix]) -> Result<Matrix> {
    if chain.len() < 2 {
        return Err(Error::Precondition(
            "nested_commutator needs a chain of length >= 2".into(),
        ));
    }
    let n = chain[0].dim();
    for m in chain {
        if m.dim() != n {
            return Err(Error::DimensionMismatch(n, m.dim()));
        }
    }
    let mut acc = chain[chain.len() - 1].clone();
    for g in chain[..chain.len() - 1].iter().rev() {
        acc = g.commutator(&acc)?;
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "step")]
pub enum StepResult {
    /// Least s such that every (s+1)-fold nested commutator of the
    /// generators is the identity.
    Step(u32),
    /// Some (cutoff+1)-fold nested commutator is still nonidentity.
    ExceedsCutoff(u32),
}

/// Outcome of the nilpotency-step check. `witness_nonvanishing` is the
/// lex-least generator-index chain whose nested commutator is nonidentity
/// at the deepest nonvanishing level (depth s for `Step(s)`, depth
/// cutoff+1 for `ExceedsCutoff`); it is `None` only when the generators
/// are all the identity. `depth_checked` is the deepest chain length
/// whose values were fully enumerated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NilpotencyVerdict {
    pub result: StepResult,
    pub depth_checked: u32,
    pub witness_nonvanishing: Option<Vec<usize>>,
    pub tuples_evaluated: usize,
}

impl NilpotencyVerdict {
    /// Re-evaluate the recorded witness chain against the generators.
    pub fn verify_witness(&self, generators: &GroupSet) -> Result<()> {
        let Some(chain) = &self.witness_nonvanishing else {
            return Ok(());
        };
        let mats: Vec<Matrix> = chain
            .iter()
            .map(|&i| {
                generators
                    .elements()
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::Verification("witness index out of range".into()))
            })
            .collect::<Result<_>>()?;
        let value = if mats.len() == 1 {
            mats[0].clone()
        } else {
            nested_commutator(&mats)?
        };
        if value.is_identity() {
            return Err(Error::Verification(
                "recorded witness chain evaluates to the identity".into(),
            ));
        }
        Ok(())
    }
}

pub fn nilpotency_step(generators: &GroupSet, cutoff: u32) -> Result<NilpotencyVerdict> {
    nilpotency_step_with_budget(generators, cutoff, DEFAULT_TUPLE_BUDGET)
}

pub fn nilpotency_step_with_budget(
    generators: &GroupSet,
    cutoff: u32,
    budget: usize,
) -> Result<NilpotencyVerdict> {
    if generators.is_empty() {
        return Err(Error::Precondition("nilpotency_step needs generators".into()));
    }
    if cutoff < 1 {
        return Err(Error::Precondition("cutoff must be >= 1".into()));
    }
    let gens = generators.elements();
    let mut evaluated = 0usize;
    // level = distinct nonidentity values of depth-j nested commutators,
    // each with its lex-least generator-index chain (levels are built in
    // lex order, so first insertion wins)
    let mut level: Vec<(Matrix, Vec<usize>)> = Vec::new();
    let mut seen: FxHashSet<Matrix> = FxHashSet::default();
    for (i, g) in gens.iter().enumerate() {
        if !g.is_identity() && seen.insert(g.clone()) {
            level.push((g.clone(), vec![i]));
        }
    }
    let mut last_witness: Option<Vec<usize>> = level.first().map(|(_, c)| c.clone());
    if level.is_empty() {
        // trivial group: vacuously abelian
        return Ok(NilpotencyVerdict {
            result: StepResult::Step(1),
            depth_checked: 1,
            witness_nonvanishing: None,
            tuples_evaluated: 0,
        });
    }
    for depth in 2..=cutoff + 1 {
        let mut next: Vec<(Matrix, Vec<usize>)> = Vec::new();
        let mut next_seen: FxHashSet<Matrix> = FxHashSet::default();
        for (i, g) in gens.iter().enumerate() {
            for (w, chain) in &level {
                evaluated += 1;
                if evaluated > budget {
                    return Err(Error::BudgetExceeded {
                        evaluated: evaluated as u64,
                        budget: budget as u64,
                    });
                }
                let c = g.commutator(w)?;
                if !c.is_identity() && next_seen.insert(c.clone()) {
                    let mut chain2 = Vec::with_capacity(chain.len() + 1);
                    chain2.push(i);
                    chain2.extend(chain);
                    next.push((c, chain2));
                }
            }
        }
        if next.is_empty() {
            return Ok(NilpotencyVerdict {
                result: StepResult::Step(depth - 1),
                depth_checked: depth,
                witness_nonvanishing: last_witness,
                tuples_evaluated: evaluated,
            });
        }
        // lex-least chain among the new level's distinct values
        last_witness = next.iter().map(|(_, c)| c).min().cloned();
        level = next;
    }
    Ok(NilpotencyVerdict {
        result: StepResult::ExceedsCutoff(cutoff),
        depth_checked: cutoff + 1,
        witness_nonvanishing: last_witness,
        tuples_evaluated: evaluated,
    })
}

/// All products of at most `radius` generators-or-inverses, plus the
/// identity, by breadth-first closure with exact deduplication.
pub fn group_ball(generators: &GroupSet, radius: u32, cap: GrowthCap) -> Result<GroupSet> {
    let n = generators.dim();
    let letters: Vec<Matrix> = generators
        .symmetrize()
        .iter()
        .filter(|m| !m.is_identity())
        .cloned()
        .collect();
    let mut seen: FxHashSet<Matrix> = FxHashSet::default();
    seen.insert(Matrix::identity(n));
    let mut frontier: Vec<Matrix> = vec![Matrix::identity(n)];
    for _ in 0..radius {
        let mut next = Vec::new();
        for f in &frontier {
            for l in &letters {
                let p = f.mul(l)?;
                if seen.insert(p.clone()) {
                    cap.check(seen.len(), "group_ball")?;
                    next.push(p);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    GroupSet::from_matrices(n, seen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{heisenberg_ball, torsion_diag, unitriangular_ball};
    use crate::scalar::GaussianRational;
    use crate::testutil::random_upper;

    fn cap() -> GrowthCap {
        GrowthCap::default()
    }

    fn heis_x() -> Matrix {
        Matrix::from_rows(&[&["1", "1", "0"], &["0", "1", "0"], &["0", "0", "1"]]).unwrap()
    }

    fn heis_y() -> Matrix {
        Matrix::from_rows(&[&["1", "0", "0"], &["0", "1", "1"], &["0", "0", "1"]]).unwrap()
    }

    #[test]
    fn nested_commutator_examples() {
        let d = Matrix::from_rows(&[&["2", "0"], &["0", "3"]]).unwrap();
        let d2 = Matrix::from_rows(&[&["1/2", "0"], &["0", "5"]]).unwrap();
        assert!(nested_commutator(&[d.clone(), d2.clone(), d.clone()])
            .unwrap()
            .is_identity());
        let (x, y) = (heis_x(), heis_y());
        // z = [x, y] is central, so [x, [x, y]] = id
        assert!(nested_commutator(&[x.clone(), x.clone(), y.clone()])
            .unwrap()
            .is_identity());
        assert_eq!(
            nested_commutator(&[x.clone(), y.clone()]).unwrap(),
            Matrix::corner_make(&GaussianRational::ONE, 3).unwrap()
        );
        let a = Matrix::from_rows(&[&["2", "0"], &["0", "1"]]).unwrap();
        let b = Matrix::from_rows(&[&["1", "1"], &["0", "1"]]).unwrap();
        assert_eq!(nested_commutator(&[a, b.clone()]).unwrap(), b);
        assert!(nested_commutator(&[b]).is_err());
    }

    #[test]
    fn commutator_antisymmetry() {
        for seed in 0..20u64 {
            let g = random_upper(seed, 3);
            let h = random_upper(seed + 100, 3);
            assert_eq!(g.commutator(&h).unwrap(), h.commutator(&g).unwrap().inv());
        }
    }

    #[test]
    fn step_of_commuting_generators() {
        let gens = torsion_diag(4).unwrap();
        let v = nilpotency_step(&gens, 3).unwrap();
        assert_eq!(v.result, StepResult::Step(1));
        v.verify_witness(&gens).unwrap();
        // trivial group
        let id_only = GroupSet::singleton(Matrix::identity(2));
        let v = nilpotency_step(&id_only, 2).unwrap();
        assert_eq!(v.result, StepResult::Step(1));
        assert!(v.witness_nonvanishing.is_none());
    }

    #[test]
    fn step_of_heisenberg() {
        let gens = GroupSet::from_matrices(3, [heis_x(), heis_y()]).unwrap();
        let v = nilpotency_step(&gens, 5).unwrap();
        assert_eq!(v.result, StepResult::Step(2));
        assert_eq!(v.depth_checked, 3);
        v.verify_witness(&gens).unwrap();
        let w = v.witness_nonvanishing.unwrap();
        assert_eq!(w.len(), 2);
    }

    #[test]
    fn step_of_unitriangular_generators() {
        for n in 2..=4usize {
            let mut gens = Vec::new();
            for i in 0..n - 1 {
                let mut entries = Matrix::identity(n).entries().to_vec();
                entries[i * n + i + 1] = GaussianRational::ONE;
                gens.push(Matrix::new(n, entries).unwrap());
            }
            let gens = GroupSet::from_matrices(n, gens).unwrap();
            let v = nilpotency_step(&gens, n as u32).unwrap();
            assert_eq!(v.result, StepResult::Step(n as u32 - 1), "n = {n}");
            v.verify_witness(&gens).unwrap();
        }
    }

    #[test]
    fn step_monotone_in_cutoff() {
        let gens = GroupSet::from_matrices(3, [heis_x(), heis_y()]).unwrap();
        let v2 = nilpotency_step(&gens, 2).unwrap();
        let v7 = nilpotency_step(&gens, 7).unwrap();
        assert_eq!(v2.result, v7.result);
    }

    #[test]
    fn step_exceeds_cutoff_for_nonnilpotent() {
        let a = Matrix::from_rows(&[&["2", "0"], &["0", "1"]]).unwrap();
        let b = Matrix::from_rows(&[&["1", "1"], &["0", "1"]]).unwrap();
        let gens = GroupSet::from_matrices(2, [a, b]).unwrap();
        for cutoff in [1u32, 3, 6] {
            let v = nilpotency_step(&gens, cutoff).unwrap();
            assert_eq!(v.result, StepResult::ExceedsCutoff(cutoff));
            assert_eq!(v.depth_checked, cutoff + 1);
            let w = v.witness_nonvanishing.clone().unwrap();
            assert_eq!(w.len() as u32, cutoff + 1);
            v.verify_witness(&gens).unwrap();
        }
    }

    #[test]
    fn step_budget_failure() {
        let gens = GroupSet::from_matrices(3, [heis_x(), heis_y()]).unwrap();
        assert!(matches!(
            nilpotency_step_with_budget(&gens, 5, 3),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    // independent oracle: BFS over Heisenberg coordinates (a, b, c) with
    // the group law (a,b,c)(a',b',c') = (a+a', b+b', c+c'+a*b')
    fn heis_coordinate_ball(gens: &[(i64, i64, i64)], radius: u32) -> usize {
        let letters: Vec<(i64, i64, i64)> = gens
            .iter()
            .flat_map(|&(a, b, c)| [(a, b, c), (-a, -b, -c + a * b)])
            .collect();
        let mut seen = std::collections::BTreeSet::new();
        seen.insert((0, 0, 0));
        let mut frontier = vec![(0i64, 0i64, 0i64)];
        for _ in 0..radius {
            let mut next = Vec::new();
            for &(a, b, c) in &frontier {
                for &(a2, b2, c2) in &letters {
                    let p = (a + a2, b + b2, c + c2 + a * b2);
                    if seen.insert(p) {
                        next.push(p);
                    }
                }
            }
            frontier = next;
        }
        seen.len()
    }

    #[test]
    fn ball_matches_coordinate_oracle() {
        let xy = GroupSet::from_matrices(3, [heis_x(), heis_y()]).unwrap();
        for r in 0..=4u32 {
            assert_eq!(
                group_ball(&xy, r, cap()).unwrap().len(),
                heis_coordinate_ball(&[(1, 0, 0), (0, 1, 0)], r),
                "radius {r}"
            );
        }
        assert_eq!(group_ball(&xy, 0, cap()).unwrap().len(), 1);
        assert_eq!(group_ball(&xy, 1, cap()).unwrap().len(), 5);
        assert_eq!(group_ball(&xy, 2, cap()).unwrap().len(), 17);
        for r in 0..=3u32 {
            assert_eq!(
                heisenberg_ball(r, cap()).unwrap().len(),
                heis_coordinate_ball(&[(1, 0, 0), (0, 1, 0), (0, 0, 1)], r),
                "radius {r}"
            );
        }
    }

    #[test]
    fn ball_fixpoint_on_finite_group() {
        let gens = torsion_diag(4).unwrap();
        let full = group_ball(&gens, 2, cap()).unwrap();
        assert_eq!(full.len(), 4);
        assert_eq!(group_ball(&gens, 3, cap()).unwrap(), full);
    }

    #[test]
    fn ball_product_containment() {
        let gens = GroupSet::from_matrices(3, [heis_x(), heis_y()]).unwrap();
        let b1 = group_ball(&gens, 1, cap()).unwrap();
        let b2 = group_ball(&gens, 2, cap()).unwrap();
        let b3 = group_ball(&gens, 3, cap()).unwrap();
        assert!(b1.product(&b2, cap()).unwrap().is_subset_of(&b3));
    }

    #[test]
    fn ball_cap_exceeded() {
        let gens = GroupSet::from_matrices(3, [heis_x(), heis_y()]).unwrap();
        let tight = GrowthCap { max_elements: 10 };
        assert!(matches!(
            group_ball(&gens, 3, tight),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn unitriangular_ball_grows() {
        let b1 = unitriangular_ball(4, 1, cap()).unwrap();
        assert_eq!(b1.len(), 7);
        let b2 = unitriangular_ball(4, 2, cap()).unwrap();
        assert!(b1.is_subset_of(&b2));
    }
}
