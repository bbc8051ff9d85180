//! Exact and high-precision arithmetic substrate.

pub mod cyclotomic;
pub mod float;
pub mod int;
pub mod modp;

pub use cyclotomic::{cyclotomic_polynomial, CyclotomicNumber, RootSum};
pub use float::{BigFloat, ComplexBig, DEFAULT_PRECISION, MIN_PRECISION};

/// Arbitrary-precision integer.
pub type Integer = num_bigint::BigInt;
/// Arbitrary-precision rational, always reduced with positive denominator.
pub type Rational = num_rational::BigRational;
