//! Sequential shortest-path interdiction with asymmetric information.
//!
//! An evader repeatedly travels from a source to a sink over a network only
//! it fully knows; an interdictor learns the arcs the evader uses and blocks
//! up to `k` of the arcs it has seen before each trip.

pub mod arcset;
pub mod fixtures;
mod flow;
pub mod format;
pub mod graph;
pub mod interdiction;
pub mod policies;
pub mod game;
pub mod oracle;
pub mod generators;
pub mod experiment;
pub mod suites;
