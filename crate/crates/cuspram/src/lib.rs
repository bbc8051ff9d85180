//! Ramification of modular parametrizations of elliptic curves at the cusps of
//! `X_0(N)`, and the exact finite-group local constants that control it.
//!
//! The numeric side evaluates the newform of a curve near each cusp and reads
//! off the vanishing order from the decay rate. The exact side builds finite
//! quotients of `GL_2` over the p-adic integers, computes their character
//! tables, and evaluates epsilon factors and the associated character sums in
//! cyclotomic fields.

pub mod arith;
pub mod characters;
pub mod cusps;
pub mod newform;
pub mod ramification;
pub mod error;
pub mod gl2;
pub mod local;

pub use error::{Error, Result};
