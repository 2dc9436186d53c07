//! Deterministic test-family generators used by the CLI and the test
//! corpora. Seeded families are reproducible across runs and platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nilpotency::group_ball;
use crate::scalar::GaussianRational;
use crate::set::{GroupSet, GrowthCap};

fn unitriangular_generators(n: usize) -> Result<GroupSet> {
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    let mut gens = Vec::new();
    for i in 0..n - 1 {
        let mut g = Matrix::identity(n);
        let mut entries: Vec<GaussianRational> = g.entries().to_vec();
        entries[i * n + i + 1] = GaussianRational::ONE;
        g = Matrix::new(n, entries)?;
        gens.push(g);
    }
    GroupSet::from_matrices(n, gens)
}

/// Word ball of the standard superdiagonal generators of the unitriangular
/// group, plus (for n = 3) the central corner generator. The 3x3 case is
/// the classical Heisenberg ball with generators x, y, z = [x, y]:
/// radius 1 has the 7 elements {id, x^-+1, y^-+1, z^-+1}.
pub fn heisenberg_ball(radius: u32, cap: GrowthCap) -> Result<GroupSet> {
    let mut gens = unitriangular_generators(3)?;
    let z = Matrix::corner_make(&GaussianRational::ONE, 3)?;
    gens = gens.union(&GroupSet::singleton(z));
    group_ball(&gens, radius, cap)
}

/// Word ball of the superdiagonal generators id + E_{i,i+1} of the
/// unitriangular group of the given dimension.
pub fn unitriangular_ball(n: usize, radius: u32, cap: GrowthCap) -> Result<GroupSet> {
    let gens = unitriangular_generators(n)?;
    group_ball(&gens, radius, cap)
}

/// {diag(base^k, 1, ..., 1) : |k| <= len}.
pub fn diag_progression(base: &GaussianRational, len: u32, n: usize) -> Result<GroupSet> {
    if base.is_zero() {
        return Err(Error::Precondition("base must be nonzero".into()));
    }
    let mut elems = Vec::new();
    let mut pos = GaussianRational::ONE;
    let inv = base.inverse()?;
    let mut neg = GaussianRational::ONE;
    for k in 0..=len {
        for value in [&pos, &neg] {
            let mut entries = Matrix::identity(n).entries().to_vec();
            entries[0] = value.clone();
            elems.push(Matrix::new(n, entries)?);
        }
        if k < len {
            pos = pos.mul(base);
            neg = neg.mul(&inv);
        }
    }
    GroupSet::from_matrices(n, elems)
}

/// {m_lambda : lambda integer, |lambda| <= len} in dimension n.
pub fn corner_progression(len: u32, n: usize) -> Result<GroupSet> {
    let mut elems = Vec::new();
    for lam in -(len as i64)..=len as i64 {
        elems.push(Matrix::corner_make(
            &GaussianRational::from_integer(lam),
            n,
        )?);
    }
    GroupSet::from_matrices(n, elems)
}

/// {d^k : |k| <= len} union {s d^k : |k| <= len} with d = diag(2, 1/2)
/// and s the antidiagonal swap. The diagonal subgroup has index 2 in the
/// group generated, which is what the finite-index reduction exercises.
pub fn dihedral(len: u32) -> Result<GroupSet> {
    let d = Matrix::from_rows(&[&["2", "0"], &["0", "1/2"]])?;
    let s = Matrix::from_rows(&[&["0", "1"], &["1", "0"]])?;
    let mut elems = Vec::new();
    let mut power = d.clone();
    elems.push(Matrix::identity(2));
    elems.push(s.clone());
    for _ in 0..len {
        elems.push(power.clone());
        elems.push(power.inv());
        elems.push(s.mul(&power)?);
        elems.push(s.mul(&power.inv())?);
        power = power.mul(&d)?;
    }
    GroupSet::from_matrices(2, elems)
}

/// The finite scalar subgroup {id}, {+-id} or {+-id, +-i*id} in 2x2.
pub fn torsion_diag(order: u32) -> Result<GroupSet> {
    let scalars: Vec<GaussianRational> = match order {
        1 => vec![GaussianRational::ONE],
        2 => vec![GaussianRational::ONE, GaussianRational::ONE.neg()],
        4 => vec![
            GaussianRational::ONE,
            GaussianRational::ONE.neg(),
            GaussianRational::I,
            GaussianRational::I.neg(),
        ],
        _ => {
            return Err(Error::Precondition(format!(
                "torsion-diag order must be 1, 2 or 4, got {order}"
            )))
        }
    };
    let elems = scalars.into_iter().map(|s| {
        Matrix::new_unchecked(
            2,
            vec![
                s.clone(),
                GaussianRational::ZERO,
                GaussianRational::ZERO,
                s,
            ],
        )
    });
    GroupSet::from_matrices(2, elems)
}

/// Ordered products x_1^{l_1} ... x_k^{l_k} with |l_i| <= lengths[i].
pub fn ordered_progression(
    generators: &[Matrix],
    lengths: &[u32],
    cap: GrowthCap,
) -> Result<GroupSet> {
    if generators.is_empty() || generators.len() != lengths.len() {
        return Err(Error::Precondition(
            "generators and lengths must be nonempty lists of equal length".into(),
        ));
    }
    let n = generators[0].dim();
    let mut tuple_count: usize = 1;
    for l in lengths {
        tuple_count = tuple_count.saturating_mul(2 * *l as usize + 1);
        cap.check(tuple_count.min(usize::MAX / 2), "ordered_progression")?;
    }
    let mut acc = vec![Matrix::identity(n)];
    for (g, l) in generators.iter().zip(lengths) {
        if g.dim() != n {
            return Err(Error::DimensionMismatch(n, g.dim()));
        }
        // powers g^-l .. g^l
        let mut powers = vec![Matrix::identity(n)];
        let mut fwd = Matrix::identity(n);
        let mut bwd = Matrix::identity(n);
        let ginv = g.inv();
        for _ in 0..*l {
            fwd = fwd.mul(g)?;
            bwd = bwd.mul(&ginv)?;
            powers.push(fwd.clone());
            powers.push(bwd.clone());
        }
        let mut next = Vec::with_capacity(acc.len() * powers.len());
        for a in &acc {
            for p in &powers {
                next.push(a.mul(p)?);
            }
        }
        acc = next;
    }
    GroupSet::from_matrices(n, acc)
}

/// Seeded random set of upper-triangular invertible matrices with entries
/// drawn from the pool (diagonal entries from its nonzero part).
pub fn random_upper_triangular(
    n: usize,
    size: usize,
    pool: &[GaussianRational],
    seed: u64,
) -> Result<GroupSet> {
    let nonzero: Vec<&GaussianRational> = pool.iter().filter(|p| !p.is_zero()).collect();
    if nonzero.is_empty() {
        return Err(Error::Precondition("entry pool has no nonzero values".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut elems: Vec<Matrix> = Vec::new();
    let mut attempts = 0usize;
    while elems.len() < size {
        attempts += 1;
        if attempts > 1000 * size + 1000 {
            return Err(Error::Precondition(format!(
                "entry pool too small to produce {size} distinct matrices"
            )));
        }
        let mut entries = vec![GaussianRational::ZERO; n * n];
        for i in 0..n {
            for j in i..n {
                entries[i * n + j] = if i == j {
                    (*nonzero[rng.gen_range(0..nonzero.len())]).clone()
                } else {
                    pool[rng.gen_range(0..pool.len())].clone()
                };
            }
        }
        let m = Matrix::new(n, entries)?;
        if !elems.contains(&m) {
            elems.push(m);
        }
    }
    GroupSet::from_matrices(n, elems)
}

/// Default entry pool for random generation: {0, +-1, +-2, +-1/2, +-i}.
pub fn default_entry_pool() -> Vec<GaussianRational> {
    ["0", "1", "-1", "2", "-2", "1/2", "-1/2", "i", "-i"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect()
}
