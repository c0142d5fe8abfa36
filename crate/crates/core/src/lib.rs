//! Pseudorandom generators for intersections of halfspaces, with exhaustive
//! verification tools and a deterministic counter for `{0,1}` programs.

// NaN-rejecting checks are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod cli;
pub mod cube;
pub mod enumerate;
pub mod error;
pub mod generators;
pub mod lab;
pub mod mollifier;
pub mod polytope;
pub mod scalar;

pub use cube::CubePoint;
pub use error::{Error, Result};

/// Polytopes over the common weight types.
pub type Polytope64 = polytope::Polytope<f64>;
pub type Polytope32 = polytope::Polytope<f32>;
pub type IntPolytope = polytope::Polytope<i64>;
pub type RationalPolytope = polytope::Polytope<num_rational::Rational64>;
