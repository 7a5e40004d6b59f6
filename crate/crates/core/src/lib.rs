//! Cycle factors of blown-up cycles: gadget constructions, exact factor
//! search, regularity diagnostics, random-graph experiments and an
//! absorbing-method pipeline.

pub mod absorb;
pub mod density;
pub mod error;
pub mod factor;
pub(crate) mod flow;
pub mod gadget;
pub mod graph;
pub mod par;
pub mod random;
pub mod rational;
pub mod regularity;

pub use error::{Error, Result};
pub use graph::{Graph, PartitionedGraph, Vertex};
pub use rational::Rational;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
