//! Report envelope and the independent checker behind `verify`.
//!
//! Reports embed every set a checker needs, so verification is mostly
//! membership and witness re-evaluation against recorded data rather than
//! re-derivation. Product recomputation happens only while it fits in a
//! fixed work budget; checks beyond the budget are reported as skipped,
//! never silently passed.

use serde::{Deserialize, Serialize};

use crate::engine::{
    witness_matrices, AssembleReport, DecompositionReport, EngineConfig,
};
use crate::error::{Error, Result};
use crate::growth::{
    ApproximateGroupCertificate, ControlCertificate, FiberReport, GrowthReport,
    HomTriplingReport, Hom, IntersectionGrowthReport, ReduceReport, RuzsaCover, ScalarSet,
    SubgroupPredicate, SumProductReport,
};
use crate::matrix::Matrix;
use crate::nilpotency::{nested_commutator, NilpotencyVerdict, StepResult};
use crate::scalar::Rational;
use crate::set::{GroupSet, GrowthCap};

/// Pairwise-product operations allowed during verification.
pub const VERIFY_WORK_BUDGET: u64 = 4_000_000;

/// Coset labelings exposed on the CLI for the finite-index reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelKind {
    /// diagonal vs non-diagonal
    Diagonal,
    /// unitriangular vs other
    Unitriangular,
}

impl LabelKind {
    pub fn label(&self, m: &Matrix) -> String {
        let inside = match self {
            LabelKind::Diagonal => m.is_diagonal(),
            LabelKind::Unitriangular => m.is_unitriangular(),
        };
        if inside { "in".to_string() } else { "out".to_string() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub input_digest: String,
    pub config: EngineConfig,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Payload {
    Gen {
        family: String,
        set: GroupSet,
    },
    Stats {
        a: GroupSet,
        max_power: u32,
        report: GrowthReport,
    },
    Certify {
        a: GroupSet,
        a_square: GroupSet,
        certificate: ApproximateGroupCertificate,
    },
    Control {
        a: GroupSet,
        b: GroupSet,
        certificate: ControlCertificate,
    },
    Cover {
        a: GroupSet,
        b: GroupSet,
        cover: RuzsaCover,
    },
    Fibers {
        a: GroupSet,
        hom: Hom,
        report: FiberReport,
    },
    HomTripling {
        a: GroupSet,
        hom: Hom,
        report: HomTriplingReport,
    },
    Intersect {
        a: GroupSet,
        predicate: SubgroupPredicate,
        max_power: u32,
        report: IntersectionGrowthReport,
    },
    SumProduct {
        u: ScalarSet,
        v: ScalarSet,
        w: ScalarSet,
        report: SumProductReport,
    },
    NilStep {
        generators: GroupSet,
        cutoff: u32,
        verdict: NilpotencyVerdict,
        witness_matrices: Vec<Matrix>,
    },
    Ball {
        generators: GroupSet,
        radius: u32,
        ball: GroupSet,
    },
    Reduce {
        a: GroupSet,
        label: LabelKind,
        report: ReduceReport,
    },
    Decompose {
        a: GroupSet,
        report: DecompositionReport,
    },
    Assemble {
        a: GroupSet,
        decomposition: DecompositionReport,
        assembly: AssembleReport,
    },
    Jordan {
        input: Matrix,
        semisimple: Matrix,
        unipotent: Matrix,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub manifest: RunManifest,
    pub payload: Payload,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

/// Budgeted work meter; recomputation beyond the budget turns into
/// skipped checks instead of unbounded work.
struct Meter {
    remaining: u64,
}

impl Meter {
    fn take(&mut self, cost: u64) -> bool {
        if cost <= self.remaining {
            self.remaining -= cost;
            true
        } else {
            false
        }
    }
}

struct Checks {
    list: Vec<Check>,
}

impl Checks {
    fn push(&mut self, name: &str, ok: bool, detail: impl Into<String>) {
        self.list.push(Check {
            name: name.to_string(),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            detail: detail.into(),
        });
    }

    fn skip(&mut self, name: &str, why: &str) {
        self.list.push(Check {
            name: name.to_string(),
            status: CheckStatus::Skipped,
            detail: why.to_string(),
        });
    }
}

/// Run every applicable check. The report fails verification iff any
/// check fails; skipped checks (budget) are reported but do not fail.
pub fn verify_report(report: &Report) -> Vec<Check> {
    let mut checks = Checks { list: Vec::new() };
    let mut meter = Meter {
        remaining: VERIFY_WORK_BUDGET,
    };
    let cap = GrowthCap::default();
    let result = match &report.payload {
        Payload::Gen { set, .. } => verify_gen(set, &mut checks),
        Payload::Stats { a, max_power, report } => {
            verify_stats(a, *max_power, report, &mut checks, &mut meter, cap)
        }
        Payload::Certify { a, a_square, certificate } => {
            verify_certify(a, a_square, certificate, &mut checks, &mut meter)
        }
        Payload::Control { a, b, certificate } => {
            verify_control(a, b, certificate, &mut checks, &mut meter)
        }
        Payload::Cover { a, b, cover } => verify_cover(a, b, cover, &mut checks, &mut meter, cap),
        Payload::Fibers { a, hom, report } => {
            verify_fibers(a, *hom, report, &mut checks, &mut meter, cap)
        }
        Payload::HomTripling { a, hom, report } => {
            verify_hom_tripling(a, *hom, report, &mut checks, &mut meter, cap)
        }
        Payload::Intersect { a, predicate, max_power, report } => {
            verify_intersect(a, *predicate, *max_power, report, &mut checks, &mut meter, cap)
        }
        Payload::SumProduct { u, v, w, report } => {
            verify_sum_product(u, v, w, report, &mut checks, &mut meter)
        }
        Payload::NilStep { generators, cutoff, verdict, witness_matrices } => {
            verify_nilstep(generators, *cutoff, verdict, witness_matrices, &mut checks, &mut meter)
        }
        Payload::Ball { generators, radius, ball } => {
            verify_ball(generators, *radius, ball, &mut checks, &mut meter, cap)
        }
        Payload::Reduce { a, label, report } => {
            verify_reduce(a, *label, report, &mut checks, &mut meter, cap)
        }
        Payload::Decompose { a, report } => {
            verify_decompose(a, report, &mut checks, &mut meter, cap)
        }
        Payload::Assemble { a, decomposition, assembly } => {
            verify_assemble(a, decomposition, assembly, &mut checks, &mut meter, cap)
        }
        Payload::Jordan { input, semisimple, unipotent } => {
            verify_jordan(input, semisimple, unipotent, &mut checks)
        }
    };
    if let Err(e) = result {
        checks.push("internal", false, format!("checker error: {e}"));
    }
    checks.list
}

pub fn first_failure(checks: &[Check]) -> Option<&Check> {
    checks.iter().find(|c| c.status == CheckStatus::Fail)
}

fn pair_cost(a: usize, b: usize) -> u64 {
    (a as u64).saturating_mul(b as u64)
}

fn verify_gen(set: &GroupSet, checks: &mut Checks) -> Result<()> {
    checks.push(
        "set-well-formed",
        !set.is_empty(),
        format!("{} elements of dimension {}", set.len(), set.dim()),
    );
    Ok(())
}

fn verify_stats(
    a: &GroupSet,
    max_power: u32,
    report: &GrowthReport,
    checks: &mut Checks,
    meter: &mut Meter,
    cap: GrowthCap,
) -> Result<()> {
    checks.push(
        "sizes-length",
        report.sizes.len() == max_power as usize,
        format!("{} entries", report.sizes.len()),
    );
    checks.push(
        "base-size",
        report.sizes.first() == Some(&a.len()),
        "|A^1| equals |A|",
    );
    let mut acc = a.clone();
    let mut verified = 1usize;
    for k in 2..=max_power.max(3) {
        if !meter.take(pair_cost(acc.len(), a.len())) {
            checks.skip("powers-recompute", "work budget exhausted");
            return Ok(());
        }
        acc = acc.product(a, cap)?;
        if (k as usize) <= report.sizes.len() {
            if report.sizes[k as usize - 1] != acc.len() {
                checks.push(
                    "powers-recompute",
                    false,
                    format!("|A^{k}| recomputed {} recorded {}", acc.len(), report.sizes[k as usize - 1]),
                );
                return Ok(());
            }
            verified = k as usize;
        }
        if k == 2 {
            checks.push(
                "doubling",
                report.doubling == Rational::ratio(acc.len(), a.len()),
                "doubling ratio matches |A^2|/|A|",
            );
        }
        if k == 3 {
            checks.push(
                "tripling",
                report.tripling == Rational::ratio(acc.len(), a.len()),
                "tripling ratio matches |A^3|/|A|",
            );
        }
    }
    checks.push(
        "powers-recompute",
        true,
        format!("sizes re-verified through |A^{verified}|"),
    );
    Ok(())
}

fn coverage_check(
    target: &GroupSet,
    x: &GroupSet,
    base: &GroupSet,
    left: bool,
) -> std::result::Result<(), Matrix> {
    for y in target.iter() {
        let hit = x.iter().any(|xm| {
            let p = if left {
                xm.inv().mul(y)
            } else {
                y.mul(&xm.inv())
            };
            p.map(|p| base.contains(&p)).unwrap_or(false)
        });
        if !hit {
            return Err(y.clone());
        }
    }
    Ok(())
}

fn verify_certify(
    a: &GroupSet,
    a_square: &GroupSet,
    cert: &ApproximateGroupCertificate,
    checks: &mut Checks,
    meter: &mut Meter,
) -> Result<()> {
    checks.push(
        "input-symmetric-with-identity",
        a.is_symmetric() && a.contains_identity(),
        "A symmetric and id in A",
    );
    checks.push("k-witness", cert.k_witness == cert.x.len(), "K equals |X|");
    checks.push("x-symmetric", cert.x.is_symmetric(), "X closed under inverse");
    checks.push("x-in-a-square", cert.x.is_subset_of(a_square), "X inside recorded A^2");
    checks.push(
        "a-in-a-square",
        a.is_subset_of(a_square),
        "A inside recorded A^2 (id in A)",
    );
    if meter.take(pair_cost(a.len(), a.len())) {
        let recomputed = a.product(a, GrowthCap::default())?;
        checks.push(
            "square-recompute",
            &recomputed == a_square,
            "recorded A^2 equals recomputed product",
        );
    } else {
        checks.skip("square-recompute", "work budget exhausted");
    }
    if meter.take(pair_cost(a_square.len(), cert.x.len())) {
        match coverage_check(a_square, &cert.x, a, true) {
            Ok(()) => checks.push("coverage", true, "A^2 inside X*A"),
            Err(y) => checks.push("coverage", false, format!("uncovered element {y:?}")),
        }
    } else {
        checks.skip("coverage", "work budget exhausted");
    }
    Ok(())
}

fn verify_control(
    a: &GroupSet,
    b: &GroupSet,
    cert: &ControlCertificate,
    checks: &mut Checks,
    meter: &mut Meter,
) -> Result<()> {
    checks.push(
        "k-bounds",
        Rational::from_usize(cert.x.len()) <= cert.k_witness
            && Rational::from_usize(b.len())
                <= cert.k_witness.mul(&Rational::from_usize(a.len())),
        "|X| <= K and |B| <= K|A|",
    );
    if meter.take(2 * pair_cost(a.len(), cert.x.len())) {
        match coverage_check(a, &cert.x, b, true) {
            Ok(()) => checks.push("left-coverage", true, "A inside X*B"),
            Err(y) => checks.push("left-coverage", false, format!("uncovered element {y:?}")),
        }
        match coverage_check(a, &cert.x, b, false) {
            Ok(()) => checks.push("right-coverage", true, "A inside B*X"),
            Err(y) => checks.push("right-coverage", false, format!("uncovered element {y:?}")),
        }
    } else {
        checks.skip("coverage", "work budget exhausted");
    }
    Ok(())
}

fn verify_cover(
    a: &GroupSet,
    b: &GroupSet,
    cover: &RuzsaCover,
    checks: &mut Checks,
    meter: &mut Meter,
    cap: GrowthCap,
) -> Result<()> {
    checks.push("b-symmetric", b.is_symmetric(), "B closed under inverse");
    checks.push("x1-in-a", cover.x1.is_subset_of(a), "X1 inside A");
    checks.push("x2-in-a", cover.x2.is_subset_of(a), "X2 inside A");
    checks.push(
        "size-bounds",
        cover.x1.len() * cover.b_size <= cover.ba_size
            && cover.x2.len() * cover.b_size <= cover.ab_size
            && cover.b_size == b.len(),
        "|X1||B| <= |BA| and |X2||B| <= |AB|",
    );
    if meter.take(pair_cost(b.len(), b.len())) {
        let b2 = b.product(b, cap)?;
        if meter.take(pair_cost(a.len(), cover.x1.len() + cover.x2.len())) {
            match coverage_check(a, &cover.x1, &b2, false) {
                Ok(()) => checks.push("cover-b2x1", true, "A inside B^2*X1"),
                Err(y) => checks.push("cover-b2x1", false, format!("uncovered element {y:?}")),
            }
            match coverage_check(a, &cover.x2, &b2, true) {
                Ok(()) => checks.push("cover-x2b2", true, "A inside X2*B^2"),
                Err(y) => checks.push("cover-x2b2", false, format!("uncovered element {y:?}")),
            }
        } else {
            checks.skip("cover-containments", "work budget exhausted");
        }
    } else {
        checks.skip("cover-containments", "work budget exhausted");
    }
    if meter.take(2 * pair_cost(a.len(), b.len())) {
        let ba = b.product(a, cap)?;
        let ab = a.product(b, cap)?;
        checks.push(
            "recorded-product-sizes",
            ba.len() == cover.ba_size && ab.len() == cover.ab_size,
            "recorded |BA|, |AB| match recomputation",
        );
    } else {
        checks.skip("recorded-product-sizes", "work budget exhausted");
    }
    Ok(())
}

fn verify_fibers(
    a: &GroupSet,
    hom: Hom,
    report: &FiberReport,
    checks: &mut Checks,
    meter: &mut Meter,
    cap: GrowthCap,
) -> Result<()> {
    let mut fibers: std::collections::BTreeMap<Matrix, usize> = Default::default();
    for m in a.iter() {
        *fibers.entry(hom.apply(m)?).or_insert(0) += 1;
    }
    let max = fibers.values().max().copied().unwrap_or(0);
    let min = fibers.values().min().copied().unwrap_or(0);
    checks.push(
        "fiber-partition",
        fibers.len() == report.fiber_count && max == report.max_fiber && min == report.min_fiber,
        "fiber count and extremes match recomputation",
    );
    if meter.take(pair_cost(a.len(), a.len())) {
        let a2 = a.product(a, cap)?;
        checks.push(
            "doubling",
            report.doubling == Rational::ratio(a2.len(), a.len()),
            "recorded doubling matches |A^2|/|A|",
        );
        checks.push(
            "inequality-flag",
            report.inequality_holds == (max * a.len() <= a2.len() * min),
            "recorded inequality flag matches recomputation",
        );
    } else {
        checks.skip("doubling", "work budget exhausted");
    }
    Ok(())
}

fn verify_hom_tripling(
    a: &GroupSet,
    hom: Hom,
    report: &HomTriplingReport,
    checks: &mut Checks,
    meter: &mut Meter,
    cap: GrowthCap,
) -> Result<()> {
    let image = GroupSet::from_matrices(
        a.dim() - 1,
        a.iter().map(|m| hom.apply(m)).collect::<Result<Vec<_>>>()?,
    )?;
    checks.push(
        "image-size",
        image.len() == report.image_size,
        "projected set size matches",
    );
    let cost = pair_cost(a.len(), a.len()) * 2 + pair_cost(image.len(), image.len()) * 2;
    if meter.take(cost) {
        let a3 = a.power(3, cap)?;
        let cube_of_image = image.power(3, cap)?;
        let image_of_cube = GroupSet::from_matrices(
            a.dim() - 1,
            a3.iter().map(|m| hom.apply(m)).collect::<Result<Vec<_>>>()?,
        )?;
        checks.push(
            "homomorphism-identity",
            (image_of_cube == cube_of_image) == report.identity_holds && report.identity_holds,
            "image of A^3 equals image(A)^3",
        );
        checks.push(
            "triplings",
            report.tripling_a == Rational::ratio(a3.len(), a.len())
                && report.tripling_image == Rational::ratio(cube_of_image.len(), image.len()),
            "recorded triplings match recomputation",
        );
    } else {
        checks.skip("homomorphism-identity", "work budget exhausted");
    }
    Ok(())
}

fn verify_intersect(
    a: &GroupSet,
    predicate: SubgroupPredicate,
    max_power: u32,
    report: &IntersectionGrowthReport,
    checks: &mut Checks,
    meter: &mut Meter,
    cap: GrowthCap,
) -> Result<()> {
    checks.push(
        "input-symmetric-with-identity",
        a.is_symmetric() && a.contains_identity(),
        "A symmetric and id in A",
    );
    checks.push(
        "monotone-flag",
        report.monotone == report.sizes.windows(2).all(|w| w[0].1 <= w[1].1)
            && report.monotone,
        "recorded sequence nondecreasing",
    );
    let mut acc = a.clone();
    for k in 2..=max_power {
        if !meter.take(pair_cost(acc.len(), a.len())) {
            checks.skip("intersection-recompute", "work budget exhausted");
            return Ok(());
        }
        acc = acc.product(a, cap)?;
        let size = acc.filter(|m| predicate.test(m)).len();
        let recorded = report
            .sizes
            .iter()
            .find(|(kk, _)| *kk == k)
            .map(|(_, s)| *s);
        if recorded != Some(size) {
            checks.push(
                "intersection-recompute",
                false,
                format!("|A^{k} intersect H| recomputed {size}, recorded {recorded:?}"),
            );
            return Ok(());
        }
    }
    checks.push("intersection-recompute", true, "all sizes match");
    Ok(())
}

fn verify_sum_product(
    u: &ScalarSet,
    v: &ScalarSet,
    w: &ScalarSet,
    report: &SumProductReport,
    checks: &mut Checks,
    meter: &mut Meter,
) -> Result<()> {
    if !meter.take(pair_cost(u.len(), v.len()) + pair_cost(u.len(), w.len())) {
        checks.skip("sum-product-recompute", "work budget exhausted");
        return Ok(());
    }
    let fresh = crate::growth::solymosi_statistic(u, v, w)?;
    checks.push(
        "sum-product-recompute",
        fresh.sum_size == report.sum_size
            && fresh.prod_size == report.prod_size
            && fresh.squared_ratio == report.squared_ratio,
        "sumset/product-set sizes and ratio match recomputation",
    );
    Ok(())
}

fn check_witness_shape(verdict: &NilpotencyVerdict, cutoff: u32) -> bool {
    match (&verdict.result, &verdict.witness_nonvanishing) {
        (StepResult::Step(s), Some(chain)) => *s as usize == chain.len(),
        (StepResult::Step(_), None) => true, // trivial generators
        (StepResult::ExceedsCutoff(c), Some(chain)) => {
            *c == cutoff && chain.len() == cutoff as usize + 1
        }
        (StepResult::ExceedsCutoff(_), None) => false,
    }
}

fn verify_nilstep(
    generators: &GroupSet,
    cutoff: u32,
    verdict: &NilpotencyVerdict,
    witness: &[Matrix],
    checks: &mut Checks,
    meter: &mut Meter,
) -> Result<()> {
    checks.push(
        "witness-shape",
        check_witness_shape(verdict, cutoff),
        "witness length matches the verdict depth",
    );
    checks.push(
        "witness-matches-indices",
        witness == witness_matrices(verdict, generators).as_slice(),
        "explicit witness matrices agree with the index chain",
    );
    if witness.is_empty() {
        checks.push(
            "trivial-generators",
            generators.iter().all(|m| m.is_identity()),
            "no witness only for identity generators",
        );
    } else {
        let value = if witness.len() == 1 {
            witness[0].clone()
        } else {
            nested_commutator(witness)?
        };
        checks.push(
            "witness-nonvanishing",
            !value.is_identity(),
            "recorded witness chain evaluates to a nonidentity element",
        );
    }
    // full re-run when the level sizes stay inside the budget
    let est = (generators.len() as u64).saturating_pow(cutoff.min(6) + 1);
    if meter.take(est.min(u64::MAX / 2)) {
        let fresh = crate::nilpotency::nilpotency_step_with_budget(
            generators,
            cutoff,
            meter.remaining.min(1_000_000) as usize + 1,
        );
        match fresh {
            Ok(fresh) => checks.push(
                "verdict-recompute",
                fresh.result == verdict.result,
                "independent re-run returns the same verdict",
            ),
            Err(Error::BudgetExceeded { .. }) => {
                checks.skip("verdict-recompute", "work budget exhausted")
            }
            Err(e) => return Err(e),
        }
    } else {
        checks.skip("verdict-recompute", "work budget exhausted");
    }
    Ok(())
}

fn verify_ball(
    generators: &GroupSet,
    radius: u32,
    ball: &GroupSet,
    checks: &mut Checks,
    meter: &mut Meter,
    cap: GrowthCap,
) -> Result<()> {
    checks.push("contains-identity", ball.contains_identity(), "id in ball");
    checks.push(
        "contains-generators",
        radius == 0 || generators.is_subset_of(ball),
        "generators in ball for radius >= 1",
    );
    if meter.take(pair_cost(ball.len(), 2 * generators.len())) {
        let fresh = crate::nilpotency::group_ball(generators, radius, cap)?;
        checks.push("ball-recompute", &fresh == ball, "BFS recomputation matches");
    } else {
        checks.skip("ball-recompute", "work budget exhausted");
    }
    Ok(())
}

fn verify_reduce(
    a: &GroupSet,
    label: LabelKind,
    report: &ReduceReport,
    checks: &mut Checks,
    meter: &mut Meter,
    cap: GrowthCap,
) -> Result<()> {
    checks.push("a-prime-in-a", report.a_prime.is_subset_of(a), "A' inside A");
    let expected = a.filter(|m| label.label(m) == report.class_label);
    checks.push(
        "class-extraction",
        expected == report.a_prime,
        "A' is exactly the labeled class",
    );
    let dominant = {
        let mut counts: std::collections::BTreeMap<String, usize> = Default::default();
        for m in a.iter() {
            *counts.entry(label.label(m)).or_insert(0) += 1;
        }
        counts.values().max().copied().unwrap_or(0)
    };
    checks.push(
        "dominant-class",
        report.a_prime.len() == dominant,
        "A' has maximal class size",
    );
    checks.push(
        "pigeonhole-ratio",
        report.pigeonhole_ratio == Rational::ratio(report.a_prime.len(), a.len()),
        "|A'|/|A| matches",
    );
    let id_label = label.label(&Matrix::identity(a.dim()));
    checks.push(
        "s-inside-h",
        report.s_inside_h == report.s.iter().all(|m| label.label(m) == id_label)
            && report.s_inside_h,
        "S carries the identity's label",
    );
    verify_control(a, &report.s, &report.certificate, checks, meter)?;
    let cost = pair_cost(report.a_prime.len(), report.a_prime.len());
    if meter.take(cost.saturating_mul(40)) {
        let b = report.a_prime.inverse().product(&report.a_prime, cap)?;
        let s = b.pm_power(6, cap)?;
        checks.push(
            "s-recompute",
            s == report.s,
            "S equals (A'^-1 A')^{+-6} recomputed",
        );
    } else {
        checks.skip("s-recompute", "work budget exhausted");
    }
    Ok(())
}

fn verify_decompose(
    a: &GroupSet,
    report: &DecompositionReport,
    checks: &mut Checks,
    meter: &mut Meter,
    cap: GrowthCap,
) -> Result<()> {
    checks.push(
        "a-prime-nonempty-in-a",
        !report.a_prime.is_empty() && report.a_prime.is_subset_of(a),
        "A' nonempty and inside A",
    );
    checks.push(
        "coset-rep",
        report.a_prime.first() == Some(&report.coset_rep),
        "coset_rep is the canonical least element of A'",
    );
    checks.push(
        "density",
        report.density == Rational::ratio(a.len(), report.a_prime.len()),
        "density equals |A|/|A'|",
    );
    checks.push(
        "c-ratio-one",
        report
            .c_set
            .iter()
            .all(|m| m.diag_ratio().map(|r| r.is_one()).unwrap_or(false)),
        "every element of C has diagonal ratio 1",
    );
    if report.dimension > 1 {
        if meter.take(pair_cost(a.len(), 1)) {
            let x_inv = report.maximizer.inv();
            let expected = a.filter(|m| {
                x_inv
                    .mul(m)
                    .map(|p| report.c_set.contains(&p))
                    .unwrap_or(false)
            });
            checks.push(
                "a-prime-is-translate-slice",
                expected == report.a_prime,
                "A' equals A intersect maximizer*C",
            );
        }
    }
    // step verdict: witness matrices and flags
    let gens = report.a_prime.translate_left(&report.coset_rep.inv())?;
    checks.push(
        "step-witness-matrices",
        report.step_witness_matrices == witness_matrices(&report.step_verdict, &gens),
        "explicit witness matrices agree with the index chain",
    );
    if !report.step_witness_matrices.is_empty() {
        let value = if report.step_witness_matrices.len() == 1 {
            report.step_witness_matrices[0].clone()
        } else {
            nested_commutator(&report.step_witness_matrices)?
        };
        checks.push(
            "step-witness-nonvanishing",
            !value.is_identity(),
            "witness chain evaluates to a nonidentity element",
        );
    }
    let (le, eq) = match report.step_verdict.result {
        StepResult::Step(s) => (
            s as usize <= report.dimension.saturating_sub(1),
            s as usize == report.dimension,
        ),
        StepResult::ExceedsCutoff(_) => (false, false),
    };
    checks.push(
        "step-flags",
        le == report.step_le_dim_minus_1 && eq == report.step_eq_dim,
        "step flags match the verdict",
    );
    let est = (gens.len() as u64).saturating_mul(gens.len() as u64 * report.step_cutoff as u64 + 1);
    if meter.take(est) {
        match crate::nilpotency::nilpotency_step_with_budget(
            &gens,
            report.step_cutoff,
            meter.remaining.max(1) as usize,
        ) {
            Ok(fresh) => checks.push(
                "step-recompute",
                fresh.result == report.step_verdict.result,
                "independent re-run returns the same step",
            ),
            Err(Error::BudgetExceeded { .. }) => {
                checks.skip("step-recompute", "work budget exhausted")
            }
            Err(e) => return Err(e),
        }
    } else {
        checks.skip("step-recompute", "work budget exhausted");
    }
    // r(x) bookkeeping identity over the recorded support
    let top = report.branch_trace.last();
    checks.push(
        "trace-flags",
        top.map(|t| t.r_sum_ok && t.r_pigeonhole_ok).unwrap_or(false),
        "recorded r(x) identity flags are set",
    );
    if report.dimension > 1 {
        let c_cost = pair_cost(a.len(), report.c_set.len());
        if meter.take(c_cost.saturating_mul(2)) {
            let support = a.product(&report.c_set.inverse(), cap)?;
            if meter.take(pair_cost(support.len(), a.len())) {
                let mut r_sum: u128 = 0;
                let mut r_max = 0usize;
                for x in support.iter() {
                    let x_inv = x.inv();
                    let r = a
                        .iter()
                        .filter(|m| {
                            x_inv
                                .mul(m)
                                .map(|p| report.c_set.contains(&p))
                                .unwrap_or(false)
                        })
                        .count();
                    r_sum += r as u128;
                    r_max = r_max.max(r);
                }
                let expected = a.len() as u128 * report.c_set.len() as u128;
                let top_ok = top
                    .map(|t| t.r_support == support.len() && t.r_max == r_max)
                    .unwrap_or(false);
                checks.push(
                    "r-identity",
                    r_sum == expected
                        && (r_max as u128) * (support.len() as u128) >= expected
                        && top_ok,
                    "sum r(x) = |A||C| and recorded maximum matches",
                );
            } else {
                checks.skip("r-identity", "work budget exhausted");
            }
        } else {
            checks.skip("r-identity", "work budget exhausted");
        }
    }
    Ok(())
}

fn verify_assemble(
    a: &GroupSet,
    decomposition: &DecompositionReport,
    assembly: &AssembleReport,
    checks: &mut Checks,
    meter: &mut Meter,
    cap: GrowthCap,
) -> Result<()> {
    verify_decompose(a, decomposition, checks, meter, cap)?;
    checks.push(
        "b-out-symmetric-with-identity",
        assembly.b_out.is_symmetric() && assembly.b_out.contains_identity(),
        "B_out symmetric with id",
    );
    checks.push(
        "approx-k",
        assembly.approx.k_witness == assembly.approx.x.len()
            && assembly.k_report.approx_k == assembly.approx.k_witness,
        "K equals |X|",
    );
    checks.push(
        "approx-x-symmetric",
        assembly.approx.x.is_symmetric(),
        "X closed under inverse",
    );
    // X inside B_out^2 via the recorded factorizations
    let mut fact_ok = assembly.x_factorizations.len() == assembly.approx.x.len();
    if fact_ok {
        for (x, [fx, p, q]) in assembly
            .approx
            .x
            .iter()
            .zip(assembly.x_factorizations.iter())
        {
            if fx != x || &p.mul(q)? != x || !assembly.b_out.contains(p) || !assembly.b_out.contains(q)
            {
                fact_ok = false;
                break;
            }
        }
    }
    checks.push(
        "x-factorizations",
        fact_ok,
        "each witness element factors as a product of two B_out elements",
    );
    // S and the nilpotency transfer
    if meter.take(pair_cost(decomposition.a_prime.len(), decomposition.a_prime.len())) {
        let s = decomposition
            .a_prime
            .inverse()
            .product(&decomposition.a_prime, cap)?;
        checks.push("s-size", s.len() == assembly.s_size, "|S| matches");
        checks.push(
            "s-step-witness",
            assembly.s_step_witness_matrices == witness_matrices(&assembly.s_step, &s),
            "S witness matrices agree with the index chain",
        );
        if !assembly.s_step_witness_matrices.is_empty() {
            let value = if assembly.s_step_witness_matrices.len() == 1 {
                assembly.s_step_witness_matrices[0].clone()
            } else {
                nested_commutator(&assembly.s_step_witness_matrices)?
            };
            checks.push(
                "s-step-witness-nonvanishing",
                !value.is_identity(),
                "S witness chain evaluates to a nonidentity element",
            );
        }
        checks.push(
            "s-in-b-out",
            s.is_subset_of(&assembly.b_out),
            "S inside B_out",
        );
    } else {
        checks.skip("s-recompute", "work budget exhausted");
    }
    checks.push(
        "step-agreement-flag",
        assembly.step_agrees
            && assembly.s_step.result == decomposition.step_verdict.result,
        "S step verdict agrees with the located coset's verdict",
    );
    verify_control(a, &assembly.b_out, &assembly.control, checks, meter)?;
    checks.push(
        "control-k-echo",
        assembly.k_report.control_k == assembly.control.k_witness,
        "control K echoed in the constants report",
    );
    // full square recompute only when the power chain fits the budget
    let chain_cost = (assembly.square_size as u64).saturating_mul(assembly.s_size as u64);
    if meter.take(chain_cost) {
        {
            let s = decomposition
                .a_prime
                .inverse()
                .product(&decomposition.a_prime, cap)?;
            let mut powers = s.increasing_powers(&[6, 12], cap)?;
            let chain = powers.pop().expect("two marks");
            let b6 = powers.pop().expect("two marks");
            checks.push(
                "b-out-recompute",
                b6 == assembly.b_out && chain.len() == assembly.square_size,
                "B_out and |B_out^2| match the recomputed power chain",
            );
            if meter.take(pair_cost(chain.len(), assembly.approx.x.len())) {
                match coverage_check(&chain, &assembly.approx.x, &assembly.b_out, true) {
                    Ok(()) => checks.push("approx-coverage", true, "B_out^2 inside X*B_out"),
                    Err(y) => checks.push(
                        "approx-coverage",
                        false,
                        format!("uncovered element {y:?}"),
                    ),
                }
            } else {
                checks.skip("approx-coverage", "work budget exhausted");
            }
        }
    } else {
        checks.skip("b-out-recompute", "work budget exhausted");
        checks.skip("approx-coverage", "work budget exhausted");
    }
    Ok(())
}

fn verify_jordan(
    input: &Matrix,
    semisimple: &Matrix,
    unipotent: &Matrix,
    checks: &mut Checks,
) -> Result<()> {
    let pair = crate::jordan::JordanPair {
        semisimple: semisimple.clone(),
        unipotent: unipotent.clone(),
    };
    match pair.verify(input) {
        Ok(()) => checks.push("jordan-pair", true, "decomposition re-verified"),
        Err(e) => checks.push("jordan-pair", false, format!("{e}")),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{assemble_control, decompose, EngineConfig};
    use crate::families::{dihedral, heisenberg_ball};
    use crate::growth::{certify_approximate_group, finite_index_reduce};
    use crate::testutil::unip_range;

    fn manifest(cmd: &str) -> RunManifest {
        RunManifest {
            command: cmd.into(),
            input_digest: crate::wire::digest_bytes(b"test"),
            config: EngineConfig::default(),
            seed: None,
        }
    }

    fn all_pass(checks: &[Check]) -> bool {
        first_failure(checks).is_none()
    }

    #[test]
    fn certify_report_round_trip_passes() {
        let a = unip_range(3);
        let (cert, a2) = certify_approximate_group(&a, GrowthCap::default()).unwrap();
        let report = Report {
            manifest: manifest("certify"),
            payload: Payload::Certify {
                a,
                a_square: a2,
                certificate: cert,
            },
        };
        let json = serde_json::to_string(&report).unwrap();
        let back: Report = serde_json::from_str(&json).unwrap();
        let checks = verify_report(&back);
        assert!(all_pass(&checks), "{checks:?}");
    }

    #[test]
    fn tampered_certificate_fails() {
        let a = unip_range(3);
        let (mut cert, a2) = certify_approximate_group(&a, GrowthCap::default()).unwrap();
        // delete one element of X (and its inverse to stay symmetric)
        let victim = cert.x.elements().last().unwrap().clone();
        let vinv = victim.inv();
        cert.x = cert.x.filter(|m| m != &victim && m != &vinv);
        cert.k_witness = cert.x.len();
        let report = Report {
            manifest: manifest("certify"),
            payload: Payload::Certify {
                a,
                a_square: a2,
                certificate: cert,
            },
        };
        let checks = verify_report(&report);
        let fail = first_failure(&checks).expect("must fail");
        assert_eq!(fail.name, "coverage");
        assert!(fail.detail.contains("uncovered"));
    }

    #[test]
    fn decompose_report_verifies_and_tamper_fails() {
        let a = heisenberg_ball(1, GrowthCap::default()).unwrap();
        let rep = decompose(&a, &EngineConfig::default()).unwrap();
        let report = Report {
            manifest: manifest("decompose"),
            payload: Payload::Decompose {
                a: a.clone(),
                report: rep.clone(),
            },
        };
        let checks = verify_report(&report);
        assert!(all_pass(&checks), "{checks:?}");
        // tamper: claim a different step
        let mut bad = rep;
        bad.step_verdict.result = StepResult::Step(1);
        let report = Report {
            manifest: manifest("decompose"),
            payload: Payload::Decompose { a, report: bad },
        };
        let checks = verify_report(&report);
        let fail = first_failure(&checks).expect("must fail");
        assert!(
            fail.name == "step-recompute" || fail.name == "step-flags",
            "{fail:?}"
        );
    }

    #[test]
    fn assemble_report_verifies() {
        let a = unip_range(2);
        let rep = decompose(&a, &EngineConfig::default()).unwrap();
        let asm = assemble_control(&a, &rep, GrowthCap::default()).unwrap();
        let report = Report {
            manifest: manifest("assemble"),
            payload: Payload::Assemble {
                a,
                decomposition: rep,
                assembly: asm,
            },
        };
        let checks = verify_report(&report);
        assert!(all_pass(&checks), "{checks:?}");
        assert!(checks.iter().any(|c| c.name == "b-out-recompute"
            && c.status == CheckStatus::Pass));
    }

    #[test]
    fn reduce_report_verifies() {
        let a = dihedral(2).unwrap();
        let rep = finite_index_reduce(
            &a,
            |m| LabelKind::Diagonal.label(m),
            GrowthCap::default(),
        )
        .unwrap();
        let report = Report {
            manifest: manifest("reduce"),
            payload: Payload::Reduce {
                a,
                label: LabelKind::Diagonal,
                report: rep,
            },
        };
        let checks = verify_report(&report);
        assert!(all_pass(&checks), "{checks:?}");
    }

    #[test]
    fn nilstep_report_verifies_and_tamper_fails() {
        let x = Matrix::from_rows(&[&["1", "1", "0"], &["0", "1", "0"], &["0", "0", "1"]])
            .unwrap();
        let y = Matrix::from_rows(&[&["1", "0", "0"], &["0", "1", "1"], &["0", "0", "1"]])
            .unwrap();
        let gens = GroupSet::from_matrices(3, [x, y]).unwrap();
        let verdict = crate::nilpotency::nilpotency_step(&gens, 4).unwrap();
        let witness = witness_matrices(&verdict, &gens);
        let report = Report {
            manifest: manifest("nilstep"),
            payload: Payload::NilStep {
                generators: gens.clone(),
                cutoff: 4,
                verdict: verdict.clone(),
                witness_matrices: witness.clone(),
            },
        };
        let checks = verify_report(&report);
        assert!(all_pass(&checks), "{checks:?}");
        // tamper: swap the witness for a commuting chain
        let mut bad_witness = witness;
        bad_witness[0] = Matrix::identity(3);
        let report = Report {
            manifest: manifest("nilstep"),
            payload: Payload::NilStep {
                generators: gens,
                cutoff: 4,
                verdict,
                witness_matrices: bad_witness,
            },
        };
        let checks = verify_report(&report);
        assert!(first_failure(&checks).is_some());
    }
}
