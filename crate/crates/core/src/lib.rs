//! Toolkit for poset-cube Ramsey lower bounds: explicit Red/Blue colorings
//! of Boolean lattices, the structural checks that make a color class
//! unable to host a copy of `2^[n]`, and an exhaustive embedding search
//! that either produces a copy or certifies that none exists.

mod bits;
pub mod coloring;
pub mod embedding;
pub mod error;
pub mod family;
pub mod flip_graph;
pub mod format;
pub mod lattice;
pub mod oracle;
pub mod restrictive;
pub mod search;

pub use coloring::{c0_color, layered_color, Color, Coloring};
pub use error::{Error, Result};
pub use family::SetFamily;
pub use lattice::{CubeSpace, ElementSet, Parity};
pub use embedding::{verify_embedding, Embedding, Violation};
pub use search::{find_copy, SearchConfig, SearchMode, SearchOutcome, SearchStatus};
