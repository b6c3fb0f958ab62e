//! Deterministic corner-case driving simulator.
//!
//! A catalog of taxonomy-classified scenarios is loaded from `.3cs` files,
//! simulated on a fixed 20 Hz step with trigger-driven events, driven by a
//! built-in or external policy, scored with severity weights, and recorded
//! into hashable traces that replay bit-exactly.

pub mod batch;
pub mod cli;
pub mod dataset;
pub mod dsl;
pub mod engine;
pub mod evaluation;
pub mod geometry;
pub mod model;
pub mod perception;
pub mod policy;
pub mod road;
pub mod runner;

/// Version stamped into traces and manifests; replay requires the same major.
pub const ENGINE_VERSION: &str = "1.0.0";
