//! 2D extended finite element solver for linear elastic fracture mechanics
//! with a subcell-free quadrature scheme for cut elements based on
//! Schwarz-Christoffel conformal mapping of sub-polygons onto the unit disk.

pub mod enrichment;
pub mod error;
pub mod fem;
pub mod fracture;
pub mod geometry;
pub mod mesh;
pub mod quadrature;
pub mod sccm;

pub use error::Error;

/// 2D point / vector.
pub type Vec2 = nalgebra::Vector2<f64>;

pub type Result<T> = std::result::Result<T, Error>;
