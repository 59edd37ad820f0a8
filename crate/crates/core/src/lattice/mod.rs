//! Finite lattices, graph Laplacians and pair indexing.

mod geometry;
mod pairs;

pub use geometry::{build_lattice, BoundaryCondition, GeometryKind, Lattice, LatticeDescription, LatticeGeometry};
pub use pairs::{uniform_mode_weight, PairIndex, PairMode};
