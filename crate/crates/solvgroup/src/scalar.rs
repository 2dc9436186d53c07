//! Exact scalar arithmetic: canonical rationals and Gaussian rationals.
//!
//! Values are immutable and always held in canonical form (reduced fraction,
//! positive denominator), so structural equality, ordering and hashing agree
//! with mathematical equality. Small values live in machine words; anything
//! that overflows is promoted to arbitrary precision, and results are demoted
//! back whenever they fit, so a given value has exactly one representation.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An exact rational number.
///
/// Invariants: denominator > 0, gcd(|numerator|, denominator) = 1, zero is
/// 0/1, and the `Big` variant is used only for values outside the
/// `i64`/`u64` range. Equality and hashing are derived from the
/// representation, which the invariants make canonical.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Rational {
    Small(i64, u64),
    Big(Box<BigRational>),
}

fn gcd_u128(a: u128, b: u128) -> u128 {
    a.gcd(&b)
}

impl Rational {
    pub const ZERO: Rational = Rational::Small(0, 1);
    pub const ONE: Rational = Rational::Small(1, 1);

    /// Canonical value from an i128/u128 fraction. `den` must be nonzero.
    fn make(num: i128, den: u128) -> Rational {
        debug_assert!(den != 0);
        if num == 0 {
            return Rational::ZERO;
        }
        // integer fast path: the dominant case in word-ball arithmetic
        if den == 1 {
            return if let Ok(n) = i64::try_from(num) {
                Rational::Small(n, 1)
            } else {
                Rational::Big(Box::new(BigRational::new_raw(
                    BigInt::from(num),
                    BigInt::from(1),
                )))
            };
        }
        let g = gcd_u128(num.unsigned_abs(), den);
        let num = num / g as i128;
        let den = den / g;
        if let (Ok(n), Ok(d)) = (i64::try_from(num), u64::try_from(den)) {
            Rational::Small(n, d)
        } else {
            let br = BigRational::new_raw(BigInt::from(num), BigInt::from(den));
            Rational::Big(Box::new(br))
        }
    }

    /// Canonicalize a `BigRational`, demoting to the small representation
    /// when the reduced value fits.
    pub fn from_big(r: BigRational) -> Rational {
        // BigRational::new reduces; values built with new_raw must be
        // re-reduced here.
        let r = BigRational::new(r.numer().clone(), r.denom().clone());
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_u64()) {
            Rational::Small(n, d)
        } else {
            Rational::Big(Box::new(r))
        }
    }

    pub fn from_integer(n: i64) -> Rational {
        Rational::Small(n, 1)
    }

    /// Build from an arbitrary numerator/denominator pair, canonicalizing.
    pub fn new(num: BigInt, den: BigInt) -> Result<Rational> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Rational::from_big(BigRational::new(num, den)))
    }

    pub fn new_i64(num: i64, den: i64) -> Result<Rational> {
        if den == 0 {
            return Err(Error::ZeroDenominator);
        }
        let (num, den) = if den < 0 {
            (-(num as i128), (den as i128).unsigned_abs())
        } else {
            (num as i128, den as u128)
        };
        Ok(Rational::make(num, den))
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Rational::Small(n, d) => {
                BigRational::new_raw(BigInt::from(*n), BigInt::from(*d))
            }
            Rational::Big(b) => (**b).clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Rational::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Rational::Small(1, 1))
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Rational::Small(n, _) => *n < 0,
            Rational::Big(b) => b.is_negative(),
        }
    }

    pub fn add(&self, other: &Rational) -> Rational {
        if let (Rational::Small(a, b), Rational::Small(c, d)) = (self, other) {
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            if let Some(num) = a
                .checked_mul(d)
                .and_then(|ad| c.checked_mul(b).and_then(|cb| ad.checked_add(cb)))
            {
                if let Some(den) = b.checked_mul(d) {
                    return Rational::make(num, den as u128);
                }
            }
        }
        Rational::from_big(self.to_big() + other.to_big())
    }

    pub fn sub(&self, other: &Rational) -> Rational {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Rational {
        match self {
            Rational::Small(n, d) => {
                if let Some(m) = n.checked_neg() {
                    Rational::Small(m, *d)
                } else {
                    Rational::make(-(*n as i128), *d as u128)
                }
            }
            Rational::Big(b) => Rational::from_big(-(**b).clone()),
        }
    }

    pub fn mul(&self, other: &Rational) -> Rational {
        if let (Rational::Small(a, b), Rational::Small(c, d)) = (self, other) {
            // i64*i64 and u64*u64 always fit in 128 bits.
            let num = *a as i128 * *c as i128;
            let den = *b as u128 * *d as u128;
            return Rational::make(num, den);
        }
        Rational::from_big(self.to_big() * other.to_big())
    }

    pub fn inverse(&self) -> Result<Rational> {
        match self {
            Rational::Small(0, _) => Err(Error::DivisionByZero),
            Rational::Small(n, d) => {
                let num = if *n < 0 { -(*d as i128) } else { *d as i128 };
                Ok(Rational::make(num, n.unsigned_abs() as u128))
            }
            Rational::Big(b) => Ok(Rational::from_big(b.recip())),
        }
    }

    pub fn div(&self, other: &Rational) -> Result<Rational> {
        Ok(self.mul(&other.inverse()?))
    }

    pub fn pow(&self, exp: u32) -> Rational {
        let mut acc = Rational::ONE;
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn from_usize(n: usize) -> Rational {
        match i64::try_from(n) {
            Ok(v) => Rational::Small(v, 1),
            Err(_) => Rational::from_big(BigRational::from_integer(BigInt::from(n))),
        }
    }

    pub fn ratio(num: usize, den: usize) -> Rational {
        Rational::from_big(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn numer_string(&self) -> String {
        match self {
            Rational::Small(n, _) => n.to_string(),
            Rational::Big(b) => b.numer().to_string(),
        }
    }

    pub fn denom_string(&self) -> String {
        match self {
            Rational::Small(_, d) => d.to_string(),
            Rational::Big(b) => b.denom().to_string(),
        }
    }

    pub fn parse_parts(num: &str, den: &str) -> Result<Rational> {
        let n = BigInt::from_str(num.trim())
            .map_err(|e| Error::Parse(format!("bad numerator {num:?}: {e}")))?;
        let d = BigInt::from_str(den.trim())
            .map_err(|e| Error::Parse(format!("bad denominator {den:?}: {e}")))?;
        Rational::new(n, d)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Rational) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Rational) -> Ordering {
        if let (Rational::Small(a, b), Rational::Small(c, d)) = (self, other) {
            if let (Some(l), Some(r)) = (
                (*a as i128).checked_mul(*d as i128),
                (*c as i128).checked_mul(*b as i128),
            ) {
                return l.cmp(&r);
            }
        }
        self.to_big().cmp(&other.to_big())
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational::Small(n, 1) => write!(f, "{n}"),
            Rational::Small(n, d) => write!(f, "{n}/{d}"),
            Rational::Big(b) => {
                if b.denom().is_one() {
                    write!(f, "{}", b.numer())
                } else {
                    write!(f, "{}/{}", b.numer(), b.denom())
                }
            }
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parse "n" or "n/d" in decimal.
impl FromStr for Rational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Rational> {
        match s.split_once('/') {
            Some((n, d)) => Rational::parse_parts(n, d),
            None => Rational::parse_parts(s, "1"),
        }
    }
}

/// A Gaussian rational a + bi with exact rational components.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl Hash for GaussianRational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.re.hash(state);
        self.im.hash(state);
    }
}

impl GaussianRational {
    pub const ZERO: GaussianRational = GaussianRational {
        re: Rational::ZERO,
        im: Rational::ZERO,
    };
    pub const ONE: GaussianRational = GaussianRational {
        re: Rational::ONE,
        im: Rational::ZERO,
    };
    pub const I: GaussianRational = GaussianRational {
        re: Rational::ZERO,
        im: Rational::ONE,
    };

    pub fn new(re: Rational, im: Rational) -> GaussianRational {
        GaussianRational { re, im }
    }

    pub fn real(re: Rational) -> GaussianRational {
        GaussianRational {
            re,
            im: Rational::ZERO,
        }
    }

    pub fn from_integer(n: i64) -> GaussianRational {
        GaussianRational::real(Rational::from_integer(n))
    }

    /// Canonicalize a raw numerator/denominator quadruple.
    pub fn canonicalize(
        re_num: BigInt,
        re_den: BigInt,
        im_num: BigInt,
        im_den: BigInt,
    ) -> Result<GaussianRational> {
        Ok(GaussianRational {
            re: Rational::new(re_num, re_den)?,
            im: Rational::new(im_num, im_den)?,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn add(&self, other: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: self.re.add(&other.re),
            im: self.im.add(&other.im),
        }
    }

    pub fn sub(&self, other: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: self.re.sub(&other.re),
            im: self.im.sub(&other.im),
        }
    }

    pub fn neg(&self) -> GaussianRational {
        GaussianRational {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    pub fn mul(&self, other: &GaussianRational) -> GaussianRational {
        // Real-by-real is by far the common case in upper-triangular work.
        if self.im.is_zero() && other.im.is_zero() {
            return GaussianRational::real(self.re.mul(&other.re));
        }
        let re = self.re.mul(&other.re).sub(&self.im.mul(&other.im));
        let im = self.re.mul(&other.im).add(&self.im.mul(&other.re));
        GaussianRational { re, im }
    }

    pub fn conj(&self) -> GaussianRational {
        GaussianRational {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    /// |z|^2 = re^2 + im^2 as a rational.
    pub fn norm_sq(&self) -> Rational {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn inverse(&self) -> Result<GaussianRational> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.im.is_zero() {
            return Ok(GaussianRational::real(self.re.inverse()?));
        }
        let n = self.norm_sq().inverse()?;
        Ok(GaussianRational {
            re: self.re.mul(&n),
            im: self.im.neg().mul(&n),
        })
    }

    pub fn div(&self, other: &GaussianRational) -> Result<GaussianRational> {
        Ok(self.mul(&other.inverse()?))
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}{}i", self.re, self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parse a human-friendly scalar: "1", "-2", "1/2", "i", "-i", "2i",
/// "1+i", "1-1/2i". Used by the CLI entry pools and generators.
impl FromStr for GaussianRational {
    type Err = Error;
    fn from_str(s: &str) -> Result<GaussianRational> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        if let Some(body) = s.strip_suffix('i') {
            // Pure imaginary or a+bi; split on the last +/- that is not
            // at position 0 and not inside a fraction.
            let split_at = body
                .char_indices()
                .skip(1)
                .filter(|(_, c)| *c == '+' || *c == '-')
                .map(|(i, _)| i)
                .last();
            if let Some(idx) = split_at {
                let (re_s, im_s) = body.split_at(idx);
                let im_body = im_s.trim_start_matches('+');
                let im = parse_im(im_body)?;
                return Ok(GaussianRational::new(re_s.parse()?, im));
            }
            return Ok(GaussianRational::new(Rational::ZERO, parse_im(body)?));
        }
        Ok(GaussianRational::real(s.parse()?))
    }
}

fn parse_im(body: &str) -> Result<Rational> {
    match body {
        "" => Ok(Rational::ONE),
        "-" => Ok(Rational::from_integer(-1)),
        other => other.parse(),
    }
}
