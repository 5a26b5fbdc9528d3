//! Abelian functions on canonical (n,s)-curves.
//!
//! The crate turns reduced divisors into values of the Kleinian ℘-functions
//! and back, evaluates the polynomial relations that cut out the Jacobian and
//! Kummer varieties, implements the divisor-level group law, and for
//! hyperelliptic curves computes periods and Riemann theta functions so the
//! algebraic side can be checked against the transcendental one.

pub mod curve;
pub mod addition;
pub mod divisor;
pub mod error;
pub mod identities;
pub mod uniformization;
pub mod numeric;
pub mod random;
pub mod suites;
pub mod transcendental;

pub use curve::{CurveModel, CurvePoint, Family, Monomial, C64};
pub use divisor::{Divisor, PolyFunction};
pub use error::{Error, Result};
pub use uniformization::{basis_to_divisor, divisor_to_basis, BasisRecord};
