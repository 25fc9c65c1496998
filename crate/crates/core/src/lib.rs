//! Rhombic-dodecahedral modular robots on the FCC lattice.
//!
//! Modules occupy lattice points and move by pivoting about an edge shared
//! with a neighbor. The crate encodes the free-space rules for those moves,
//! decides rigidity and super-rigidity, builds roof/cap style gadgets and
//! runs exhaustive reachability searches.

pub mod analysis;
pub mod config;
pub mod error;
pub mod gadgets;
pub mod lattice;
pub mod mesh;
pub mod moves;
pub mod occupancy;
pub mod planar;
pub mod search;

pub use config::{CoordSystem, Configuration};
pub use error::{Error, Result};
pub use lattice::{HexLayerCoord, NeighborClass, Position, SymmetryOp};
pub use moves::{Catalog, Connectivity, LegalMove, MoveClass, MoveModel, MoveTemplate, Rules};
