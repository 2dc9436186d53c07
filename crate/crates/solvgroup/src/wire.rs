//! JSON wire formats. All numbers travel as decimal strings (no floating
//! point anywhere): a rational is {"num", "den"}, a Gaussian rational is
//! the four-string array [re_num, re_den, im_num, im_den], a matrix is
//! {"n", "rows"}, a set is {"n", "elements"} with duplicates tolerated on
//! read. Parsers accept non-canonical fractions and canonicalize on
//! ingest, so serialized output is byte-deterministic.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::growth::ScalarSet;
use crate::matrix::Matrix;
use crate::scalar::{GaussianRational, Rational};
use crate::set::GroupSet;

#[derive(Serialize, Deserialize)]
struct RationalWire {
    num: String,
    den: String,
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RationalWire {
            num: self.numer_string(),
            den: self.denom_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let w = RationalWire::deserialize(d)?;
        Rational::parse_parts(&w.num, &w.den).map_err(D::Error::custom)
    }
}

impl Serialize for GaussianRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [
            self.re.numer_string(),
            self.re.denom_string(),
            self.im.numer_string(),
            self.im.denom_string(),
        ]
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<GaussianRational, D::Error> {
        let parts = <[String; 4]>::deserialize(d)?;
        let re = Rational::parse_parts(&parts[0], &parts[1]).map_err(D::Error::custom)?;
        let im = Rational::parse_parts(&parts[2], &parts[3]).map_err(D::Error::custom)?;
        Ok(GaussianRational::new(re, im))
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixWire {
    n: usize,
    rows: Vec<Vec<GaussianRational>>,
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dim();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| self.entry(i, j).clone()).collect())
            .collect();
        MatrixWire { n, rows }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Matrix, D::Error> {
        let w = MatrixWire::deserialize(d)?;
        if w.rows.len() != w.n || w.rows.iter().any(|r| r.len() != w.n) {
            return Err(D::Error::custom(format!(
                "matrix shape mismatch: expected {0}x{0} rows",
                w.n
            )));
        }
        let entries: Vec<GaussianRational> = w.rows.into_iter().flatten().collect();
        Matrix::new(w.n, entries).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct GroupSetWire {
    n: usize,
    elements: Vec<Matrix>,
}

impl Serialize for GroupSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GroupSetWire {
            n: self.dim(),
            elements: self.elements().to_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<GroupSet, D::Error> {
        let w = GroupSetWire::deserialize(d)?;
        GroupSet::from_matrices(w.n, w.elements).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct ScalarSetWire {
    elements: Vec<GaussianRational>,
}

impl Serialize for ScalarSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ScalarSetWire {
            elements: self.elements.iter().cloned().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ScalarSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<ScalarSet, D::Error> {
        let w = ScalarSetWire::deserialize(d)?;
        Ok(ScalarSet::from_iter(w.elements))
    }
}

/// Hex SHA-256 of the raw input bytes, used for the manifest digest.
pub fn digest_bytes(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    let mut s = String::with_capacity(64);
    for b in out {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Serialize a value to the canonical report encoding (compact JSON with
/// struct-declaration field order; byte-deterministic for equal values).
pub fn to_canonical_json<T: Serialize>(value: &T) -> crate::error::Result<String> {
    serde_json::to_string_pretty(value)
        .map_err(|e| crate::error::Error::Parse(format!("serialization failed: {e}")))
}
