//! Schwarz-Christoffel disk-to-polygon maps and disk cubature rules, used to
//! integrate over arbitrary sub-polygons without quadrature subcells.

mod disk;
mod gauss;
mod map;

pub use disk::{chebyshev_disk_rule, midpoint_disk_rule, DiskRule, DiskRuleKind};
pub use gauss::{gauss_jacobi, gauss_legendre};
pub use map::{map_quadrature, polygon_quadrature, ConformalMap};
