//! Exact rational machinery for clouds in ℝᴺ.
//!
//! A *cloud around `a`* is a set meeting every line through `a` in finitely
//! many points. This crate represents a useful class of such sets
//! symbolically and implements, with exact arithmetic, the constructions that
//! move between planar clouds and clouds in higher dimensions:
//!
//! - [`clouds`]: the cloud algebra, exact line sections and cylinder
//!   extension of a planar cloud to ℝᴺ;
//! - [`collineation`]: the affine collineation making projections onto the
//!   first two coordinates distinct and noncollinear, and the lift of a planar
//!   cover to ℝᴺ;
//! - [`projective`]: homogeneous coordinates, the affine chart, points at
//!   infinity and collineations of projective space;
//! - [`schmerl`]: the window transform turning clouds around `p_i` into sets
//!   that are finite on lines parallel to the `i`-th axis;
//! - [`kuratowski`]: index-comparison decompositions of countable powers and
//!   an exhaustive prefix verifier.
//!
//! Coordinates are [`Scalar`]s (exact rationals) throughout; irrational line
//! parameters only appear as isolated roots of quadratics.

pub mod check;
pub mod clouds;
pub mod collineation;
pub mod error;
pub mod geom;
pub mod kuratowski;
pub mod linalg;
pub mod projective;
pub mod roots;
pub mod sampling;
pub mod scalar;
pub mod schmerl;

pub use clouds::{extend, extend_family, Body, Cloud, CloudDecision, ExtendOptions, LineIntersection, RationalLine};
pub use error::{Error, Result};
pub use geom::{collinear, extend_to_basis, line_through, AffineMap, Line, Point};
pub use linalg::Matrix;
pub use roots::{quadratic_roots_in_interval, OpenInterval, Root, RootReport};
pub use scalar::Scalar;
