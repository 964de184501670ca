//! A laboratory for the bounded halting problem.
//!
//! The crate provides a small Turing machine model with a self-delimiting
//! encoding, deciders for BHP/DBHP, instrumented acceptors for their
//! complements, the hardwiring speedup transform together with certifiers
//! for the resulting speedup, Levin-style universal witness search with
//! search-from-decision, and an experiment harness.

pub mod codec;
pub mod harness;
pub mod languages;
pub mod levin;
pub mod machine;
pub mod runtime;
pub mod speedup;
