//! Combinatorial rigidity toolkit: simplicial complexes, balanced colorings,
//! cycle checks over Z₂ and ℚ, and exact infinitesimal-rigidity tests for
//! generic and coordinate-sparse point configurations.

pub mod coloring;
pub mod complex;
pub mod error;
pub mod generators;
pub mod graph;
pub mod harness;
pub mod io;
pub mod chains;
pub mod linalg;
pub mod rigidity;
pub mod sr_bridge;

pub use coloring::{Color, ColorMap, ColoringOutcome, SupportMap};
pub use complex::{Complex, FVector, Face, HVector, Vertex};
pub use error::{Error, Result};
pub use graph::Graph;
