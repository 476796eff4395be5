//! Discrete configuration spaces of hard squares in a rectangle.
//!
//! The crate builds the cube complex of ordered configurations of `n` labeled
//! unit squares in a `w x h` rectangle, computes its homology exactly, and
//! compares the result with the homology of configurations of points in the
//! plane. Supporting algebra (injective words, Lie brackets, wheel bases)
//! and an augmented Mayer–Vietoris spectral sequence engine live alongside.

pub mod chain;
pub mod config;
pub mod error;
pub mod grid;
pub mod homology;
pub mod puzzle;
pub mod scalar;
pub mod spectral;
pub mod sweep;
pub mod wheels;
pub mod words;

pub use chain::{ChainComplex, SparseIntMatrix, SparseMatrix};
pub use error::{Error, Result};

/// Arbitrary-precision integers.
pub type Int = num_bigint::BigInt;
/// Exact rationals.
pub type Rational = num_rational::BigRational;
/// The prime field used by default for large rank computations.
pub type Fp = scalar::Zp<2_147_483_647>;
