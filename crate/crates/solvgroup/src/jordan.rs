//! Exact Jordan splitting of upper-triangular matrices into commuting
//! semisimple and unipotent parts.
//!
//! For upper-triangular input the eigenvalues are the diagonal entries and
//! stay in Q(i), so the semisimple part can be computed as a polynomial in
//! the matrix: Chinese-remainder interpolation finds p with
//! p(x) = lambda_i mod (x - lambda_i)^{m_i} for each distinct eigenvalue,
//! and the semisimple part is p(g). No root-finding, no eigenvectors.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::GaussianRational;

/// g = semisimple * unipotent with the two parts commuting, the unipotent
/// part having all eigenvalues 1, and the semisimple part annihilated by a
/// squarefree polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanPair {
    pub semisimple: Matrix,
    pub unipotent: Matrix,
}

impl JordanPair {
    /// Re-check every invariant from scratch: reassembly, commutation,
    /// unipotence, squarefree annihilator of the semisimple part.
    pub fn verify(&self, original: &Matrix) -> Result<()> {
        let s = &self.semisimple;
        let u = &self.unipotent;
        if s.mul(u)? != *original {
            return Err(Error::Verification("s*u != g".into()));
        }
        if s.mul(u)? != u.mul(s)? {
            return Err(Error::Verification("s and u do not commute".into()));
        }
        let n = u.dim();
        let nil = sub_identity(u);
        let mut pow = nil.clone();
        for _ in 1..n {
            pow = mat_mul_raw(&pow, &nil);
        }
        if pow.iter().any(|e| !e.is_zero()) {
            return Err(Error::Verification("(u - id)^n != 0".into()));
        }
        // squarefree annihilator: product of (x - lambda) over distinct
        // diagonal eigenvalues of s must kill s and be coprime to its
        // derivative.
        if !s.is_upper_triangular() {
            return Err(Error::Verification("semisimple part not triangular".into()));
        }
        let distinct: BTreeMap<GaussianRational, usize> = diag_multiplicities(s);
        let mut p = Poly::one();
        for lam in distinct.keys() {
            p = p.mul(&Poly::linear(lam));
        }
        if !p.eval_matrix(s)?.entries().iter().all(|e| e.is_zero()) {
            return Err(Error::Verification("annihilator does not kill s".into()));
        }
        let g = p.gcd(&p.derivative());
        if g.degree() != 0 {
            return Err(Error::Verification("annihilator not squarefree".into()));
        }
        Ok(())
    }
}

fn diag_multiplicities(g: &Matrix) -> BTreeMap<GaussianRational, usize> {
    let mut m = BTreeMap::new();
    for i in 0..g.dim() {
        *m.entry(g.entry(i, i).clone()).or_insert(0) += 1;
    }
    m
}

fn sub_identity(u: &Matrix) -> Vec<GaussianRational> {
    let n = u.dim();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let e = u.entry(i, j).clone();
            out.push(if i == j {
                e.sub(&GaussianRational::ONE)
            } else {
                e
            });
        }
    }
    out
}

// raw (possibly singular) n x n product used for nilpotence checks
fn mat_mul_raw(a: &[GaussianRational], b: &[GaussianRational]) -> Vec<GaussianRational> {
    let n = (a.len() as f64).sqrt() as usize;
    let mut out = vec![GaussianRational::ZERO; n * n];
    for i in 0..n {
        for k in 0..n {
            if a[i * n + k].is_zero() {
                continue;
            }
            for j in 0..n {
                if b[k * n + j].is_zero() {
                    continue;
                }
                out[i * n + j] = out[i * n + j].add(&a[i * n + k].mul(&b[k * n + j]));
            }
        }
    }
    out
}

/// Split an upper-triangular invertible matrix into its commuting
/// semisimple and unipotent parts, both polynomials in the input.
pub fn jordan_split(g: &Matrix) -> Result<JordanPair> {
    if !g.is_upper_triangular() {
        return Err(Error::NotUpperTriangular);
    }
    let n = g.dim();
    let eigen = diag_multiplicities(g);
    let semisimple = if eigen.len() == 1 {
        // single eigenvalue: s = lambda * id
        let lam = eigen.keys().next().unwrap();
        let mut entries = vec![GaussianRational::ZERO; n * n];
        for i in 0..n {
            entries[i * n + i] = lam.clone();
        }
        Matrix::new_unchecked(n, entries)
    } else {
        let p = crt_interpolant(&eigen)?;
        p.eval_matrix(g)?
    };
    let unipotent = semisimple.inv().mul(g)?;
    let pair = JordanPair {
        semisimple,
        unipotent,
    };
    pair.verify(g)?;
    Ok(pair)
}

/// p with p(x) = lambda_i mod (x - lambda_i)^{m_i} for each eigenvalue.
fn crt_interpolant(eigen: &BTreeMap<GaussianRational, usize>) -> Result<Poly> {
    let moduli: Vec<(Poly, &GaussianRational)> = eigen
        .iter()
        .map(|(lam, m)| (Poly::linear(lam).pow(*m), lam))
        .collect();
    let total = moduli
        .iter()
        .fold(Poly::one(), |acc, (m, _)| acc.mul(m));
    let mut p = Poly::zero();
    for (mi, lam) in &moduli {
        let rest = total.div_exact(mi)?;
        // rest * inv = 1 mod mi; the moduli are pairwise coprime because
        // the eigenvalues are distinct.
        let (g, _, v) = mi.ext_gcd(&rest);
        if g.degree() != 0 {
            return Err(Error::Verification("CRT moduli not coprime".into()));
        }
        let scale = g.coeff(0).inverse()?;
        let inv = v.scale(&scale);
        let term = rest.mul(&inv).scale(lam);
        p = p.add(&term).rem(&total)?;
    }
    Ok(p)
}

/// Dense polynomial over the Gaussian rationals, low-degree-first
/// coefficients with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Poly {
    coeffs: Vec<GaussianRational>,
}

impl Poly {
    fn zero() -> Poly {
        Poly { coeffs: vec![] }
    }

    fn one() -> Poly {
        Poly {
            coeffs: vec![GaussianRational::ONE],
        }
    }

    /// x - lambda
    fn linear(lambda: &GaussianRational) -> Poly {
        Poly {
            coeffs: vec![lambda.neg(), GaussianRational::ONE],
        }
    }

    fn trim(mut self) -> Poly {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    fn coeff(&self, i: usize) -> GaussianRational {
        self.coeffs.get(i).cloned().unwrap_or(GaussianRational::ZERO)
    }

    fn add(&self, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| self.coeff(i).add(&other.coeff(i)))
            .collect();
        Poly { coeffs }.trim()
    }

    fn sub(&self, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| self.coeff(i).sub(&other.coeff(i)))
            .collect();
        Poly { coeffs }.trim()
    }

    fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut coeffs =
            vec![GaussianRational::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        Poly { coeffs }.trim()
    }

    fn scale(&self, c: &GaussianRational) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect(),
        }
        .trim()
    }

    fn pow(&self, e: usize) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    fn div_rem(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut rem = self.clone();
        let mut quot = vec![
            GaussianRational::ZERO;
            self.coeffs.len().saturating_sub(divisor.coeffs.len()) + 1
        ];
        let lead_inv = divisor.coeffs.last().unwrap().inverse()?;
        while !rem.is_zero() && rem.coeffs.len() >= divisor.coeffs.len() {
            let shift = rem.coeffs.len() - divisor.coeffs.len();
            let factor = rem.coeffs.last().unwrap().mul(&lead_inv);
            quot[shift] = quot[shift].add(&factor);
            let mut sub = vec![GaussianRational::ZERO; shift];
            sub.extend(divisor.coeffs.iter().map(|c| c.mul(&factor)));
            rem = rem.sub(&Poly { coeffs: sub });
        }
        Ok((Poly { coeffs: quot }.trim(), rem))
    }

    fn rem(&self, divisor: &Poly) -> Result<Poly> {
        Ok(self.div_rem(divisor)?.1)
    }

    fn div_exact(&self, divisor: &Poly) -> Result<Poly> {
        let (q, r) = self.div_rem(divisor)?;
        if !r.is_zero() {
            return Err(Error::Verification("inexact polynomial division".into()));
        }
        Ok(q)
    }

    fn derivative(&self) -> Poly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.mul(&GaussianRational::from_integer(i as i64)))
            .collect();
        Poly { coeffs }.trim()
    }

    fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a
    }

    /// Extended Euclid: (g, u, v) with u*self + v*other = g.
    fn ext_gcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut u0, mut u1) = (Poly::one(), Poly::zero());
        let (mut v0, mut v1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1).expect("nonzero divisor");
            r0 = r1;
            r1 = r;
            let u = u0.sub(&q.mul(&u1));
            u0 = u1;
            u1 = u;
            let v = v0.sub(&q.mul(&v1));
            v0 = v1;
            v1 = v;
        }
        (r0, u0, v0)
    }

    /// Horner evaluation at a matrix argument.
    fn eval_matrix(&self, g: &Matrix) -> Result<Matrix> {
        let n = g.dim();
        let mut acc = vec![GaussianRational::ZERO; n * n];
        for c in self.coeffs.iter().rev() {
            acc = mat_mul_raw(&acc, g.entries());
            for i in 0..n {
                acc[i * n + i] = acc[i * n + i].add(c);
            }
        }
        Ok(Matrix::new_unchecked(n, acc))
    }
}
