//! Geometry of planar n-gons degenerated to segments.
//!
//! A polygon with labeled vertices is a point of ℂⁿ. The polygons whose
//! vertices are collinear form a smooth submanifold `L(n)` of real dimension
//! `n + 2`; those with the first vertex pinned at the origin form `M(n)` of
//! dimension `n`. This crate makes that geometry computable:
//!
//! - [`segment`]: membership, the mapping-torus coordinates, the splitting
//!   `L(n) ≅ M(n) × ℂ`, ends of a segment and the `U_k` charts.
//! - [`rulings`]: tangent frames, segment containment and the straight lines
//!   contained in both manifolds.
//! - [`geodesic`]: induced-metric geodesic integration with residual checks of
//!   the geodesic conditions, conserved quantities and the two lifting results.
//! - [`orbifold`]: the vertex re-enumeration as an integer matrix, its rotation
//!   normal form, the group it generates with the antipodal map, lens-space
//!   parameters and the fixed-point stratification.

pub mod error;
pub mod geodesic;
pub mod orbifold;
pub mod point;
pub mod rulings;
pub mod segment;

pub use error::{Error, Result};
pub use point::{pairing, PolyPoint, Space};

pub use num_complex::Complex64;

/// Relative tolerance used for collinearity decisions unless a caller overrides it.
pub const DEFAULT_TOL: f64 = 1e-10;
