//! Shape analysis for graph transformation systems.
//!
//! Concrete graphs are encoded as 2-valued logical structures; shape graphs
//! are 3-valued structures with summary nodes. [`engine::explore`] computes a
//! finite over-approximation of all reachable graphs and checks forbidden
//! patterns against it.

pub mod engine;
pub mod formula;
pub mod kleene;
pub mod rules;
pub mod structure;

pub use kleene::TruthValue;
