//! Zero-visibility graph searching.
//!
//! The searcher picks up to `k` vertices per turn; an invisible, arbitrarily
//! fast intruder recontaminates everything it can reach. This crate simulates
//! the game, decides the inspection number exactly on small graphs, computes
//! pathwidth, recognises graphs whose subdivisions are searchable with three
//! searchers (via simple generalized series-parallel decompositions), and
//! synthesizes verified 3-searches on suitable subdivisions.

pub mod enumerate;
pub mod error;
pub mod game;
pub mod generate;
pub mod graph;
pub mod gsp;
pub mod io;
pub mod solver;
pub mod synth;

pub use error::{Error, Result};
pub use game::{Search, SearchTrace};
pub use graph::{Graph, VertexSet};
