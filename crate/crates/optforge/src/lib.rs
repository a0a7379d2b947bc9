//! optforge: solver-verified optimization benchmark instances.
//!
//! The crate generates feasible-by-construction optimization problems across
//! twelve categories, renders each instance at three binding-difficulty
//! levels (prose, pipe tables, externalized data files), and evaluates
//! candidate solutions by objective fingerprinting, failure classification,
//! and canonical-form isomorphism. A companion harness generates hardened
//! long-context retrieval tasks for measuring binding degradation in
//! isolation.

pub mod model;
pub mod solver;
