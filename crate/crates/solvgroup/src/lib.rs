//! Exact-arithmetic toolkit for finite subsets of solvable matrix groups.
//!
//! The library works over the Gaussian rationals so that matrix equality,
//! hashing and set membership are decidable, and provides:
//!
//! - exact scalars and invertible matrices with the structural maps of the
//!   upper-triangular group (corner projections, corner subgroup, diagonal
//!   ratios, Jordan splitting);
//! - finite deduplicated matrix sets with a product-set calculus under
//!   explicit growth caps;
//! - growth statistics, approximate-group and control certification,
//!   Ruzsa covering, fiber statistics and intersection growth;
//! - nested-commutator nilpotency certification and word balls;
//! - a recursive decomposition engine that extracts a large subset lying in
//!   a left coset of a certified-nilpotent subgroup, and assembles a
//!   controlling approximate group from it.

pub mod engine;
pub mod error;
pub mod families;
pub mod growth;
pub mod jordan;
pub mod matrix;
pub mod nilpotency;
pub mod scalar;
pub mod set;
pub mod verify;
pub mod wire;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use scalar::{GaussianRational, Rational};
pub use set::{GroupSet, GrowthCap};
