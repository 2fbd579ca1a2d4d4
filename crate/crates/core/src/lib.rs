//! Randomized adjacency sketches: labeling schemes, the structures they are
//! built from, and adversaries that try to forge a non-edge.

pub mod graph;
pub mod plane;
pub mod rng;
pub mod scheme;
pub mod color;
pub mod matching;
pub mod retrieval;
pub mod bounded;
pub mod equality;
pub mod adversary;
pub mod spec;
