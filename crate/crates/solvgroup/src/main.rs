//! Command-line surface: generate corpus families, run any library
//! operation on JSON matrix sets, and independently verify emitted reports.
//!
//! Output is byte-deterministic: identical inputs, flags and seed produce
//! identical bytes. Exit codes: 0 success, 1 failed verification, 2
//! precondition violation, 3 growth-cap or budget exceeded, 4 parse error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use solvgroup::engine::{assemble_control, decompose, EngineConfig};
use solvgroup::families;
use solvgroup::growth::{
    certify_approximate_group, certify_control, fiber_stats, finite_index_reduce,
    growth_stats, hom_tripling_report, intersection_growth, ruzsa_cover,
    solymosi_statistic, Hom, ScalarSet, SubgroupPredicate,
};
use solvgroup::jordan::jordan_split;
use solvgroup::nilpotency::{group_ball, nilpotency_step_with_budget};
use solvgroup::verify::{
    first_failure, verify_report, Check, CheckStatus, LabelKind, Payload, Report,
    RunManifest,
};
use solvgroup::wire::{digest_bytes, to_canonical_json};
use solvgroup::{Error, GaussianRational, GroupSet, GrowthCap, Matrix, Rational, Result};

#[derive(Parser)]
#[command(
    name = "solvgroup",
    version,
    about = "Exact computations with finite subsets of solvable matrix groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a corpus family as GroupSet JSON.
    Gen {
        #[command(subcommand)]
        family: Family,
        /// Output path; stdout when omitted.
        #[arg(long, global = true)]
        output: Option<PathBuf>,
    },
    /// Run an operation and emit a verifiable JSON report.
    Run {
        #[command(subcommand)]
        op: Op,
    },
    /// Independently re-check a report produced by `run`.
    Verify {
        /// Report file to check.
        report: PathBuf,
    },
}

#[derive(Subcommand)]
enum Family {
    /// Word ball in the Heisenberg group on {x, y, z = [x,y]}.
    HeisenbergBall {
        #[arg(long)]
        radius: u32,
        #[arg(long, default_value_t = 5_000_000)]
        cap: usize,
    },
    /// Word ball on the superdiagonal unitriangular generators.
    UnitriangularBall {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        radius: u32,
        #[arg(long, default_value_t = 5_000_000)]
        cap: usize,
    },
    /// Diagonal matrices diag(b^l, 1, ..., 1) for |l| <= len.
    DiagProgression {
        /// Base scalar, e.g. "2" or "1/2" or "i".
        #[arg(long)]
        base: String,
        #[arg(long)]
        len: u32,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Corner matrices id + l*E_{1n} for |l| <= len.
    CornerProgression {
        #[arg(long)]
        len: u32,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Diagonal progression together with a swap-like reflection coset.
    Dihedral {
        #[arg(long)]
        len: u32,
    },
    /// Scalar matrices of the given multiplicative order (1, 2 or 4).
    TorsionDiag {
        #[arg(long)]
        order: u32,
    },
    /// Ordered products x_1^{l_1}...x_k^{l_k} from a generator file.
    OrderedProgression {
        /// GroupSet JSON whose elements are the ordered generators.
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated exponent bounds, one per generator.
        #[arg(long)]
        lengths: String,
        #[arg(long, default_value_t = 5_000_000)]
        cap: usize,
    },
    /// Seeded random upper-triangular invertible matrices.
    RandomUpperTriangular {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated entry pool; defaults to 0,1,-1,2,-2,1/2,-1/2,i,-i.
        #[arg(long)]
        pool: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum HomArg {
    Pi,
    PiPrime,
}

impl From<HomArg> for Hom {
    fn from(h: HomArg) -> Hom {
        match h {
            HomArg::Pi => Hom::Pi,
            HomArg::PiPrime => Hom::PiPrime,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PredicateArg {
    Corner,
    Diagonal,
    UnitriangularCenter,
    WholeGroup,
}

impl From<PredicateArg> for SubgroupPredicate {
    fn from(p: PredicateArg) -> SubgroupPredicate {
        match p {
            PredicateArg::Corner => SubgroupPredicate::Corner,
            PredicateArg::Diagonal => SubgroupPredicate::Diagonal,
            PredicateArg::UnitriangularCenter => SubgroupPredicate::UnitriangularCenter,
            PredicateArg::WholeGroup => SubgroupPredicate::WholeGroup,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LabelArg {
    Diagonal,
    Unitriangular,
}

impl From<LabelArg> for LabelKind {
    fn from(l: LabelArg) -> LabelKind {
        match l {
            LabelArg::Diagonal => LabelKind::Diagonal,
            LabelArg::Unitriangular => LabelKind::Unitriangular,
        }
    }
}

/// Flags shared by every `run` operation.
#[derive(Args, Clone)]
struct CommonFlags {
    /// Growth cap in elements for all product-set computations.
    #[arg(long, global = true, default_value_t = 5_000_000)]
    cap: usize,
    /// Ratio-richness exponent gamma (rational, e.g. 4 or 3/2).
    #[arg(long, global = true)]
    gamma: Option<String>,
    /// Nilpotency-step cutoff; defaults to the matrix dimension.
    #[arg(long, global = true)]
    nil_cutoff: Option<u32>,
    /// Budget on commutator-chain evaluations.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    nil_budget: usize,
    /// Seed recorded in the manifest (randomized generators only).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Opt-in corner-intersection / sum-product evidence in decompose.
    #[arg(long, global = true)]
    verify_corner: bool,
    /// Override for the corner power exponent N.
    #[arg(long, global = true)]
    corner_n: Option<u32>,
    /// Output format (json only).
    #[arg(long, global = true, default_value = "json")]
    format: String,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Op {
    /// Power-set sizes and doubling/tripling constants.
    Stats {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_power: u32,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Approximate-group certificate: A^2 inside X*A.
    Certify {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Control certificate: A inside (X*B) and (B*X).
    Control {
        #[arg(long)]
        input: PathBuf,
        /// The controlling set B.
        #[arg(long)]
        other: PathBuf,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Ruzsa covering: A inside B^2*X1 and X2*B^2.
    Cover {
        #[arg(long)]
        input: PathBuf,
        /// The symmetric covering set B.
        #[arg(long)]
        other: PathBuf,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Fiber statistics of A under a corner homomorphism.
    Fibers {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "pi")]
        hom: HomArg,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Set identity hom(A^3) = hom(A)^3 with tripling constants.
    Homtripling {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "pi")]
        hom: HomArg,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Growth of |A^k intersect H| for a subgroup predicate.
    Intersect {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        predicate: PredicateArg,
        #[arg(long, default_value_t = 4)]
        max_power: u32,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Sum-product statistic on inline scalar sets.
    Sumproduct {
        /// Comma-separated scalars, e.g. "1,2" or "1,i,1/2".
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[arg(long)]
        w: String,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Nilpotency step of the group generated by the input set.
    Nilstep {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        cutoff: u32,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Word ball of the given radius on the input generators.
    Ball {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        radius: u32,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Finite-index reduction into the dominant coset class.
    Reduce {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "diagonal")]
        label: LabelArg,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Recursive coset-of-nilpotent decomposition.
    Decompose {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Decompose, then assemble the controlling approximate group.
    Assemble {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Jordan split of a single matrix (input set of size one).
    Jordan {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: CommonFlags,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen { family, output } => {
            let set = build_family(&family)?;
            emit(&set, output.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { op } => {
            let (report, output) = run_op(op)?;
            emit(&report, output.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { report } => cmd_verify(&report),
    }
}

fn emit<T: serde::Serialize>(value: &T, output: Option<&std::path::Path>) -> Result<()> {
    let json = to_canonical_json(value)?;
    match output {
        Some(path) => fs::write(path, json.as_bytes() as &[u8])
            .map_err(|e| Error::Precondition(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn parse_scalar(s: &str) -> Result<GaussianRational> {
    s.trim()
        .parse()
        .map_err(|e: Error| Error::Parse(format!("scalar {s:?}: {e}")))
}

fn parse_scalar_list(s: &str) -> Result<Vec<GaussianRational>> {
    s.split(',').map(parse_scalar).collect()
}

fn parse_lengths(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|e| Error::Parse(format!("length {t:?}: {e}")))
        })
        .collect()
}

fn read_set(path: &std::path::Path) -> Result<(GroupSet, Vec<u8>)> {
    let bytes = fs::read(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    let set: GroupSet = serde_json::from_slice(&bytes)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok((set, bytes))
}

fn build_family(family: &Family) -> Result<GroupSet> {
    match family {
        Family::HeisenbergBall { radius, cap } => {
            families::heisenberg_ball(*radius, GrowthCap::new(*cap))
        }
        Family::UnitriangularBall { n, radius, cap } => {
            families::unitriangular_ball(*n, *radius, GrowthCap::new(*cap))
        }
        Family::DiagProgression { base, len, n } => {
            families::diag_progression(&parse_scalar(base)?, *len, *n)
        }
        Family::CornerProgression { len, n } => families::corner_progression(*len, *n),
        Family::Dihedral { len } => families::dihedral(*len),
        Family::TorsionDiag { order } => families::torsion_diag(*order),
        Family::OrderedProgression { input, lengths, cap } => {
            let (gens, _) = read_set(input)?;
            let lens = parse_lengths(lengths)?;
            let mats: Vec<Matrix> = gens.iter().cloned().collect();
            families::ordered_progression(&mats, &lens, GrowthCap::new(*cap))
        }
        Family::RandomUpperTriangular { n, size, seed, pool } => {
            let pool = match pool {
                Some(p) => parse_scalar_list(p)?,
                None => families::default_entry_pool(),
            };
            families::random_upper_triangular(*n, *size, &pool, *seed)
        }
    }
}

fn engine_config(common: &CommonFlags) -> Result<EngineConfig> {
    if common.format != "json" {
        return Err(Error::Precondition(format!(
            "unsupported format {:?}; only json is available",
            common.format
        )));
    }
    let mut config = EngineConfig::default();
    config.cap = GrowthCap::new(common.cap);
    config.corner_cap = GrowthCap::new(common.cap);
    if let Some(g) = &common.gamma {
        config.gamma = g
            .parse::<Rational>()
            .map_err(|e| Error::Parse(format!("gamma {g:?}: {e}")))?;
    }
    config.nil_cutoff = common.nil_cutoff;
    config.nil_budget = common.nil_budget;
    config.verify_corner = common.verify_corner;
    config.corner_n_override = common.corner_n;
    Ok(config)
}

fn manifest(command: &str, input_bytes: &[u8], common: &CommonFlags) -> Result<RunManifest> {
    Ok(RunManifest {
        command: command.to_string(),
        input_digest: digest_bytes(input_bytes),
        config: engine_config(common)?,
        seed: common.seed,
    })
}

fn run_op(op: Op) -> Result<(Report, Option<PathBuf>)> {
    let (manifest, payload, output) = match op {
        Op::Stats { input, max_power, common } => {
            let (a, bytes) = read_set(&input)?;
            let report = growth_stats(&a, max_power, GrowthCap::new(common.cap))?;
            (
                manifest("stats", &bytes, &common)?,
                Payload::Stats { a, max_power, report },
                common.output,
            )
        }
        Op::Certify { input, common } => {
            let (a, bytes) = read_set(&input)?;
            let (certificate, a_square) =
                certify_approximate_group(&a, GrowthCap::new(common.cap))?;
            (
                manifest("certify", &bytes, &common)?,
                Payload::Certify { a, a_square, certificate },
                common.output,
            )
        }
        Op::Control { input, other, common } => {
            let (a, mut bytes) = read_set(&input)?;
            let (b, more) = read_set(&other)?;
            bytes.extend_from_slice(&more);
            let certificate = certify_control(&a, &b, GrowthCap::new(common.cap))?;
            (
                manifest("control", &bytes, &common)?,
                Payload::Control { a, b, certificate },
                common.output,
            )
        }
        Op::Cover { input, other, common } => {
            let (a, mut bytes) = read_set(&input)?;
            let (b, more) = read_set(&other)?;
            bytes.extend_from_slice(&more);
            let cover = ruzsa_cover(&a, &b, GrowthCap::new(common.cap))?;
            (
                manifest("cover", &bytes, &common)?,
                Payload::Cover { a, b, cover },
                common.output,
            )
        }
        Op::Fibers { input, hom, common } => {
            let (a, bytes) = read_set(&input)?;
            let hom: Hom = hom.into();
            let report = fiber_stats(&a, hom, GrowthCap::new(common.cap))?;
            (
                manifest("fibers", &bytes, &common)?,
                Payload::Fibers { a, hom, report },
                common.output,
            )
        }
        Op::Homtripling { input, hom, common } => {
            let (a, bytes) = read_set(&input)?;
            let hom: Hom = hom.into();
            let report = hom_tripling_report(&a, hom, GrowthCap::new(common.cap))?;
            (
                manifest("homtripling", &bytes, &common)?,
                Payload::HomTripling { a, hom, report },
                common.output,
            )
        }
        Op::Intersect { input, predicate, max_power, common } => {
            let (a, bytes) = read_set(&input)?;
            let predicate: SubgroupPredicate = predicate.into();
            let report = intersection_growth(
                &a,
                |m| predicate.test(m),
                max_power,
                GrowthCap::new(common.cap),
            )?;
            (
                manifest("intersect", &bytes, &common)?,
                Payload::Intersect { a, predicate, max_power, report },
                common.output,
            )
        }
        Op::Sumproduct { u, v, w, common } => {
            let bytes = format!("u={u};v={v};w={w}").into_bytes();
            let u = ScalarSet::from_iter(parse_scalar_list(&u)?);
            let v = ScalarSet::from_iter(parse_scalar_list(&v)?);
            let w = ScalarSet::from_iter(parse_scalar_list(&w)?);
            let report = solymosi_statistic(&u, &v, &w)?;
            (
                manifest("sumproduct", &bytes, &common)?,
                Payload::SumProduct { u, v, w, report },
                common.output,
            )
        }
        Op::Nilstep { input, cutoff, common } => {
            let (generators, bytes) = read_set(&input)?;
            let verdict = nilpotency_step_with_budget(&generators, cutoff, common.nil_budget)?;
            let witness = solvgroup::engine::witness_matrices(&verdict, &generators);
            (
                manifest("nilstep", &bytes, &common)?,
                Payload::NilStep {
                    generators,
                    cutoff,
                    verdict,
                    witness_matrices: witness,
                },
                common.output,
            )
        }
        Op::Ball { input, radius, common } => {
            let (generators, bytes) = read_set(&input)?;
            let ball = group_ball(&generators, radius, GrowthCap::new(common.cap))?;
            (
                manifest("ball", &bytes, &common)?,
                Payload::Ball { generators, radius, ball },
                common.output,
            )
        }
        Op::Reduce { input, label, common } => {
            let (a, bytes) = read_set(&input)?;
            let label: LabelKind = label.into();
            let report =
                finite_index_reduce(&a, |m| label.label(m), GrowthCap::new(common.cap))?;
            (
                manifest("reduce", &bytes, &common)?,
                Payload::Reduce { a, label, report },
                common.output,
            )
        }
        Op::Decompose { input, common } => {
            let (a, bytes) = read_set(&input)?;
            let config = engine_config(&common)?;
            let report = decompose(&a, &config)?;
            (
                manifest("decompose", &bytes, &common)?,
                Payload::Decompose { a, report },
                common.output,
            )
        }
        Op::Assemble { input, common } => {
            let (a, bytes) = read_set(&input)?;
            let config = engine_config(&common)?;
            let decomposition = decompose(&a, &config)?;
            let assembly = assemble_control(&a, &decomposition, config.cap)?;
            (
                manifest("assemble", &bytes, &common)?,
                Payload::Assemble { a, decomposition, assembly },
                common.output,
            )
        }
        Op::Jordan { input, common } => {
            let (set, bytes) = read_set(&input)?;
            if set.len() != 1 {
                return Err(Error::Precondition(format!(
                    "jordan takes a one-element set, got {} elements",
                    set.len()
                )));
            }
            let g = set.first().unwrap().clone();
            let pair = jordan_split(&g)?;
            (
                manifest("jordan", &bytes, &common)?,
                Payload::Jordan {
                    input: g,
                    semisimple: pair.semisimple,
                    unipotent: pair.unipotent,
                },
                common.output,
            )
        }
    };
    Ok((Report { manifest, payload }, output))
}

fn cmd_verify(path: &std::path::Path) -> Result<ExitCode> {
    let bytes = fs::read(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    let report: Report = serde_json::from_slice(&bytes)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let checks = verify_report(&report);
    print_checks(&checks);
    match first_failure(&checks) {
        None => Ok(ExitCode::SUCCESS),
        Some(fail) => {
            eprintln!("verification failed: {} — {}", fail.name, fail.detail);
            Ok(ExitCode::from(1))
        }
    }
}

fn print_checks(checks: &[Check]) {
    for c in checks {
        let tag = match c.status {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skipped => "skip",
        };
        println!("{tag}  {}  {}", c.name, c.detail);
    }
}
