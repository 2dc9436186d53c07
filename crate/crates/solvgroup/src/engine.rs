//! The recursive decomposition engine: given a finite set of
//! upper-triangular matrices, extract a large subset lying in a left
//! coset of a subgroup whose nilpotency step is certified, then assemble
//! the controlling approximate group from it.
//!
//! Every quantity in the reports is measured exactly; nothing is assumed
//! from theory. The recursion refines through the two corner projections,
//! partitions by the diagonal ratio, takes the largest class, and locates
//! the densest translate of its difference set.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growth::{
    certify_approximate_group_with_square, certify_control, growth_stats, solymosi_statistic,
    ApproximateGroupCertificate, ControlCertificate, ScalarSet, SumProductReport,
};
use crate::matrix::Matrix;
use crate::nilpotency::{nilpotency_step_with_budget, NilpotencyVerdict, StepResult};
use crate::scalar::{GaussianRational, Rational};
use crate::set::{GroupSet, GrowthCap};

/// Tuning knobs for `decompose` / `assemble_control`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EngineConfig {
    /// Ratio-richness exponent: the class-count threshold is
    /// max(1, tripling^gamma). Labeling only; never changes control flow.
    pub gamma: Rational,
    /// Cutoff for the nilpotency-step check; defaults to the dimension.
    pub nil_cutoff: Option<u32>,
    /// Budget on commutator evaluations inside the step check.
    pub nil_budget: usize,
    pub cap: GrowthCap,
    /// Opt-in corner-intersection / sum-product evidence.
    pub verify_corner: bool,
    pub corner_cap: GrowthCap,
    /// Override for the corner power exponent N (default 3*2^(n-1) - 2).
    pub corner_n_override: Option<u32>,
}

impl Default for EngineConfig {
    fn default() -> EngineConfig {
        EngineConfig {
            gamma: Rational::from_integer(4),
            nil_cutoff: None,
            nil_budget: crate::nilpotency::DEFAULT_TUPLE_BUDGET,
            cap: GrowthCap::default(),
            verify_corner: false,
            corner_cap: GrowthCap::default(),
            corner_n_override: None,
        }
    }
}

/// Partition of a set of upper-triangular matrices by the diagonal ratio
/// x_11 / x_nn. Classes are disjoint with union the input.
pub fn ratio_partition(a: &GroupSet) -> Result<BTreeMap<GaussianRational, GroupSet>> {
    let mut classes: BTreeMap<GaussianRational, Vec<Matrix>> = BTreeMap::new();
    for m in a.iter() {
        classes.entry(m.diag_ratio()?).or_default().push(m.clone());
    }
    classes
        .into_iter()
        .map(|(k, v)| Ok((k, GroupSet::from_matrices(a.dim(), v)?)))
        .collect()
}

/// The corner power exponent N = 3 * 2^(n-1) - 2.
pub fn corner_default_exponent(n: usize) -> u32 {
    3 * (1u32 << (n as u32 - 1)) - 2
}

/// Exact lambda-set of B^N intersected with the corner subgroup
/// {id + lambda E_1n}. A verification probe, not on the main path: B^N
/// explodes quickly and the cap is expected to bite for all but tiny B.
pub fn corner_intersection(
    b: &GroupSet,
    n_power: u32,
    cap: GrowthCap,
) -> Result<BTreeSet<GaussianRational>> {
    if n_power < 1 {
        return Err(Error::Precondition("corner power N must be >= 1".into()));
    }
    let bn = b.power(n_power, cap)?;
    Ok(bn.iter().filter_map(|m| m.corner_extract()).collect())
}

/// Exact test for R > max(1, K^gamma) with gamma = p/q, done by
/// cross-powering so no irrational arithmetic is needed.
fn is_ratio_rich(r: usize, tripling: &Rational, gamma: &Rational) -> Result<bool> {
    let p: u32 = gamma
        .numer_string()
        .parse()
        .map_err(|_| Error::Precondition("gamma must be a small positive rational".into()))?;
    let q: u32 = gamma
        .denom_string()
        .parse()
        .map_err(|_| Error::Precondition("gamma must be a small positive rational".into()))?;
    if p == 0 {
        return Err(Error::Precondition("gamma must be positive".into()));
    }
    let r_rat = Rational::from_usize(r);
    if r_rat <= Rational::ONE {
        return Ok(false);
    }
    // R > K^{p/q}  <=>  R^q > K^p (both sides >= 1 here)
    let lhs = r_rat.pow(q);
    let rhs = if *tripling <= Rational::ONE {
        Rational::ONE
    } else {
        tripling.pow(p)
    };
    Ok(lhs > rhs)
}

/// Per-level record of the recursion.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelTrace {
    pub dimension: usize,
    pub set_size: usize,
    /// |A2| after both projection refinements.
    pub refined_size: usize,
    pub tripling: Rational,
    pub ratio_class_count: usize,
    pub gamma: Rational,
    /// Exact D = max(1, tripling^gamma) when gamma is an integer.
    pub d_threshold: Option<Rational>,
    /// "base-case", "ratio-few" or "ratio-rich".
    pub branch: String,
    pub degenerate_fallback: bool,
    pub largest_class_size: usize,
    pub c_size: usize,
    /// |A1|/|A| achieved by the pi refinement (absent at the base case).
    pub fiber_fraction_pi: Option<Rational>,
    /// |A2|/|A1| achieved by the pi-prime refinement.
    pub fiber_fraction_pi_prime: Option<Rational>,
    /// Observation: the pi-projection of the doubly refined set still lies
    /// in the subset located by the pi-recursion (recorded, not assumed).
    pub pi_projection_in_subset: Option<bool>,
    /// |A * C^-1|, the support of the r scan.
    pub r_support: usize,
    pub r_max: usize,
    pub r_sum_ok: bool,
    pub r_pigeonhole_ok: bool,
}

/// Optional corner-intersection and sum-product evidence.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CornerEvidence {
    pub exponent_n: u32,
    pub lambda_values: Vec<GaussianRational>,
    pub ratio_values: Vec<GaussianRational>,
    pub sum_product: SumProductReport,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub dimension: usize,
    pub input_size: usize,
    pub a_prime: GroupSet,
    /// Canonically least element of A'; the nilpotency check runs on
    /// coset_rep^-1 * A'.
    pub coset_rep: Matrix,
    /// The r-scan maximizer x with A' = A intersect x*C.
    pub maximizer: Matrix,
    pub c_set: GroupSet,
    /// |A| / |A'|.
    pub density: Rational,
    pub step_cutoff: u32,
    pub step_verdict: NilpotencyVerdict,
    /// The witness chain as explicit matrices (generators of
    /// coset_rep^-1 * A' indexed by the verdict's witness).
    pub step_witness_matrices: Vec<Matrix>,
    pub step_le_dim_minus_1: bool,
    pub step_eq_dim: bool,
    pub branch_trace: Vec<LevelTrace>,
    /// Pairwise probe a^-1 b in C^2 for a, b in A' (when affordable).
    pub coset_probe: Option<bool>,
    pub corner_evidence: Option<CornerEvidence>,
}

/// Resolve a verdict's index chain against its generator set.
pub fn witness_matrices(verdict: &NilpotencyVerdict, gens: &GroupSet) -> Vec<Matrix> {
    verdict
        .witness_nonvanishing
        .as_deref()
        .unwrap_or(&[])
        .iter()
        .filter_map(|&i| gens.elements().get(i).cloned())
        .collect()
}

fn step_flags(verdict: &NilpotencyVerdict, n: usize) -> (bool, bool) {
    match verdict.result {
        StepResult::Step(s) => (s as usize <= n.saturating_sub(1), s as usize == n),
        StepResult::ExceedsCutoff(_) => (false, false),
    }
}

fn finish_report(
    a: &GroupSet,
    a_prime: GroupSet,
    maximizer: Matrix,
    c: GroupSet,
    branch_trace: Vec<LevelTrace>,
    corner_evidence: Option<CornerEvidence>,
    config: &EngineConfig,
) -> Result<DecompositionReport> {
    let n = a.dim();
    let coset_rep = a_prime
        .first()
        .ok_or_else(|| Error::Precondition("located subset is empty".into()))?
        .clone();
    let gens = a_prime.translate_left(&coset_rep.inv())?;
    let cutoff = config.nil_cutoff.unwrap_or(n as u32).max(1);
    let step_verdict = nilpotency_step_with_budget(&gens, cutoff, config.nil_budget)?;
    let step_witness_matrices = witness_matrices(&step_verdict, &gens);
    let (le, eq) = step_flags(&step_verdict, n);
    // bounded pairwise coset probe: a^-1 b must land in C^2
    let coset_probe = if a_prime.len() <= 64 && c.len() <= 4096 {
        let c2 = c.product(&c, config.cap)?;
        let ok = a_prime.iter().all(|x| {
            a_prime
                .iter()
                .all(|y| c2.contains(&x.inv().mul(y).expect("dims agree")))
        });
        Some(ok)
    } else {
        None
    };
    Ok(DecompositionReport {
        dimension: n,
        input_size: a.len(),
        density: Rational::ratio(a.len(), a_prime.len()),
        a_prime,
        coset_rep,
        maximizer,
        c_set: c,
        step_cutoff: cutoff,
        step_verdict,
        step_witness_matrices,
        step_le_dim_minus_1: le,
        step_eq_dim: eq,
        branch_trace,
        coset_probe,
        corner_evidence,
    })
}

fn project_set<F>(a: &GroupSet, f: F) -> Result<GroupSet>
where
    F: Fn(&Matrix) -> Result<Matrix>,
{
    GroupSet::from_matrices(
        a.dim() - 1,
        a.iter().map(|m| f(m)).collect::<Result<Vec<_>>>()?,
    )
}

pub fn decompose(a: &GroupSet, config: &EngineConfig) -> Result<DecompositionReport> {
    if a.is_empty() {
        return Err(Error::Precondition("decompose needs a nonempty set".into()));
    }
    for m in a.iter() {
        if !m.is_upper_triangular() {
            return Err(Error::NotUpperTriangular);
        }
    }
    let n = a.dim();
    if n == 1 {
        // 1x1 invertible matrices commute; the whole set qualifies
        let c = a.product(&a.inverse(), config.cap)?;
        let trace = LevelTrace {
            dimension: 1,
            set_size: a.len(),
            refined_size: a.len(),
            tripling: growth_stats(a, 3, config.cap)?.tripling,
            ratio_class_count: ratio_partition(a)?.len(),
            gamma: config.gamma.clone(),
            d_threshold: None,
            branch: "base-case".into(),
            degenerate_fallback: false,
            largest_class_size: a.len(),
            c_size: c.len(),
            fiber_fraction_pi: None,
            fiber_fraction_pi_prime: None,
            pi_projection_in_subset: None,
            r_support: 0,
            r_max: 0,
            r_sum_ok: true,
            r_pigeonhole_ok: true,
        };
        let maximizer = a.first().expect("nonempty").clone();
        return finish_report(a, a.clone(), maximizer, c, vec![trace], None, config);
    }

    let tripling = growth_stats(a, 3, config.cap)?.tripling;

    // (2) refine through pi
    let pa = project_set(a, |m| m.pi_project())?;
    let rep_pi = decompose(&pa, config)?;
    let t = &rep_pi.a_prime;
    let a1 = a.filter(|m| t.contains(&m.pi_project().expect("checked upper-triangular")));
    let frac_pi = Rational::ratio(a1.len(), a.len());

    // (3) refine through pi-prime
    let p1 = project_set(&a1, |m| m.pi_prime_project())?;
    let rep_pip = decompose(&p1, config)?;
    let u = &rep_pip.a_prime;
    let a2 = a1.filter(|m| u.contains(&m.pi_prime_project().expect("checked upper-triangular")));
    let frac_pip = Rational::ratio(a2.len(), a1.len());
    let pi_obs = a2
        .iter()
        .map(|m| m.pi_project())
        .collect::<Result<Vec<_>>>()?
        .iter()
        .all(|p| t.contains(p));

    // (4) ratio partition of the refined set
    let classes = ratio_partition(&a2)?;
    let class_count = classes.len();
    let ratio_rich = is_ratio_rich(class_count, &tripling, &config.gamma)?;
    let d_threshold = if config.gamma.denom_string() == "1" {
        let p: u32 = config.gamma.numer_string().parse().unwrap_or(u32::MAX);
        if p == u32::MAX {
            None
        } else {
            let d = tripling.pow(p);
            Some(if d < Rational::ONE { Rational::ONE } else { d })
        }
    } else {
        None
    };
    let largest = classes
        .values()
        .max_by_key(|cls| cls.len())
        .expect("a2 nonempty")
        .clone();

    // (5) difference set of the largest class; degenerate singleton class
    // falls back to the full ratio-1 part of A2 * A2^-1
    let degenerate = largest.len() == 1;
    let c = if degenerate {
        let mut acc = GroupSet::empty(n);
        for cls in classes.values() {
            acc = acc.union(&cls.product(&cls.inverse(), config.cap)?);
            config.cap.check(acc.len(), "ratio_one_difference")?;
        }
        acc
    } else {
        largest.product(&largest.inverse(), config.cap)?
    };
    debug_assert!(c
        .iter()
        .all(|m| m.diag_ratio().map(|r| r.is_one()).unwrap_or(false)));

    // (6) locate the densest translate of C
    let support = a.product(&c.inverse(), config.cap)?;
    let mut r_sum: u128 = 0;
    let mut r_max = 0usize;
    let mut maximizer: Option<Matrix> = None;
    for x in support.iter() {
        let x_inv = x.inv();
        let r = a
            .iter()
            .filter(|m| c.contains(&x_inv.mul(m).expect("dims agree")))
            .count();
        r_sum += r as u128;
        if r > r_max {
            r_max = r;
            maximizer = Some(x.clone());
        }
    }
    let r_sum_ok = r_sum == a.len() as u128 * c.len() as u128;
    let r_pigeonhole_ok = (r_max as u128) * (support.len() as u128)
        >= a.len() as u128 * c.len() as u128;
    if !r_sum_ok || !r_pigeonhole_ok {
        return Err(Error::Verification(
            "r(x) bookkeeping identity failed".into(),
        ));
    }
    let maximizer = maximizer.expect("r_max >= 1 by pigeonhole");
    let max_inv = maximizer.inv();
    let a_prime = a.filter(|m| c.contains(&max_inv.mul(m).expect("dims agree")));

    let corner_evidence = if config.verify_corner {
        Some(build_corner_evidence(&a2, &classes, config)?)
    } else {
        None
    };

    let trace = LevelTrace {
        dimension: n,
        set_size: a.len(),
        refined_size: a2.len(),
        tripling,
        ratio_class_count: class_count,
        gamma: config.gamma.clone(),
        d_threshold,
        branch: if ratio_rich { "ratio-rich" } else { "ratio-few" }.into(),
        degenerate_fallback: degenerate,
        largest_class_size: largest.len(),
        c_size: c.len(),
        fiber_fraction_pi: Some(frac_pi),
        fiber_fraction_pi_prime: Some(frac_pip),
        pi_projection_in_subset: Some(pi_obs),
        r_support: support.len(),
        r_max,
        r_sum_ok,
        r_pigeonhole_ok,
    };
    let mut branch_trace = rep_pi.branch_trace;
    branch_trace.extend(rep_pip.branch_trace);
    branch_trace.push(trace);
    finish_report(a, a_prime, maximizer, c, branch_trace, corner_evidence, config)
}

fn build_corner_evidence(
    a2: &GroupSet,
    classes: &BTreeMap<GaussianRational, GroupSet>,
    config: &EngineConfig,
) -> Result<CornerEvidence> {
    let n = a2.dim();
    let exponent_n = config
        .corner_n_override
        .unwrap_or_else(|| corner_default_exponent(n));
    let b = a2.product(&a2.inverse(), config.corner_cap)?;
    let lambdas = corner_intersection(&b, exponent_n, config.corner_cap)?;
    let s_set = ScalarSet::from_iter(lambdas.iter().cloned());
    let ratio_values: Vec<GaussianRational> = classes.keys().cloned().collect();
    let t_set = ScalarSet::from_iter(ratio_values.iter().cloned());
    let sum_product = solymosi_statistic(&s_set, &s_set, &t_set)?;
    Ok(CornerEvidence {
        exponent_n,
        lambda_values: lambdas.into_iter().collect(),
        ratio_values,
        sum_product,
    })
}

/// Measured constants from the assembly.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KReport {
    pub tripling: Rational,
    pub approx_k: usize,
    pub control_k: Rational,
}

/// B_out = (A'^-1 A')^6 together with its approximate-group certificate,
/// the control certificate for A, and the nilpotency transfer check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AssembleReport {
    pub s_size: usize,
    pub b_out: GroupSet,
    pub approx: ApproximateGroupCertificate,
    pub square_size: usize,
    /// For each x in the approximate-group witness X: [x, p, q] with
    /// x = p*q and p, q in B_out, so X inside B_out^2 re-verifies without
    /// recomputing the square.
    pub x_factorizations: Vec<[Matrix; 3]>,
    pub control: ControlCertificate,
    pub s_step: NilpotencyVerdict,
    pub s_step_witness_matrices: Vec<Matrix>,
    pub step_agrees: bool,
    pub k_report: KReport,
}

pub fn assemble_control(
    a: &GroupSet,
    report: &DecompositionReport,
    cap: GrowthCap,
) -> Result<AssembleReport> {
    if !report.a_prime.is_subset_of(a) {
        return Err(Error::Precondition(
            "report does not belong to this input set".into(),
        ));
    }
    let s = report.a_prime.inverse().product(&report.a_prime, cap)?;
    // power chain S^6, S^12 by frontier layering (id is in S, so the
    // powers increase and only new layers need multiplying); never the
    // |S^6|^2 pairwise square
    let mut powers = s.increasing_powers(&[6, 12], cap)?;
    let square = powers.pop().expect("two marks");
    let b_out = powers.pop().expect("two marks");
    let approx = certify_approximate_group_with_square(&b_out, &square)?;
    let mut x_factorizations = Vec::with_capacity(approx.x.len());
    for x in approx.x.iter() {
        let mut found = None;
        for w in b_out.iter() {
            let q = w.mul(x)?;
            if b_out.contains(&q) {
                found = Some([x.clone(), w.inv(), q]);
                break;
            }
        }
        x_factorizations.push(found.ok_or_else(|| {
            Error::Verification("witness element admits no factorization over B_out".into())
        })?);
    }
    let control = certify_control(a, &b_out, cap)?;
    let cutoff = report.step_cutoff;
    let s_step = nilpotency_step_with_budget(&s, cutoff, crate::nilpotency::DEFAULT_TUPLE_BUDGET)?;
    let s_step_witness_matrices = witness_matrices(&s_step, &s);
    let step_agrees = s_step.result == report.step_verdict.result;
    if !step_agrees {
        return Err(Error::Verification(
            "nilpotency step of S disagrees with the located coset's verdict".into(),
        ));
    }
    let k_report = KReport {
        tripling: growth_stats(a, 3, cap)?.tripling,
        approx_k: approx.k_witness,
        control_k: control.k_witness.clone(),
    };
    Ok(AssembleReport {
        s_size: s.len(),
        b_out,
        approx,
        square_size: square.len(),
        x_factorizations,
        control,
        s_step,
        s_step_witness_matrices,
        step_agrees,
        k_report,
    })
}
