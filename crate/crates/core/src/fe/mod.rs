//! Reference elements, quadrature and finite element spaces.

pub mod element;
pub mod quadrature;
pub mod sample;
pub mod space;

pub use element::{ElementFamily, Kind};
pub use quadrature::{edge_rule, triangle_rule, EdgeRule, QuadratureRule};
pub use space::{edge_reference_point, global_edge_normal, BasisValues, CellGeom, FESpace};

/// Default quadrature degree for forms whose factors have degree at most `deg`.
pub fn default_degree(deg: usize) -> usize {
    (2 * deg + 3).max(5)
}
