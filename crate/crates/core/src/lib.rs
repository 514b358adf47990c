//! Homology of the cellular model `cell(n, w)` of disk configurations in a
//! strip, disjoint-tori certificates, and the resulting sequential
//! topological complexity values.
//!
//! The symbolic modules are generic over a coefficient [`Scalar`]; the type
//! aliases below fix exact big rationals.

pub mod certificates;
pub mod chains;
pub mod cohomology;
pub mod error;
pub mod f2;
pub mod scalar;
pub mod symbols;
pub mod tc_report;
pub mod wheels;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Exact arbitrary-precision rationals.
pub type Rational = num_rational::BigRational;

/// First-homology vector with exact rational coefficients.
pub type H1Vec = wheels::H1Vector<Rational>;

/// Exterior-algebra element with exact rational coefficients.
pub type ExtElem = cohomology::ExtElement<Rational>;
