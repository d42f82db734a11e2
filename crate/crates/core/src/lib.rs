//! Core algorithms for testing whether cohorts of accounts from different
//! states coordinate with each other.
//!
//! The crate is `no_std` and only needs `alloc`. It covers the in-memory
//! dataset model, the five behavioral traces, TF-IDF vectors with a sparse
//! cosine join, retweet/reply suspiciousness scores, state-level aggregate
//! networks, one-sided Mann-Whitney testing with Bonferroni correction, and a
//! seeded synthetic data generator. File formats and the command line live in
//! the `cotrace` crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod aggregate;
pub mod ingest;
pub mod interactions;
pub mod pipeline;
pub mod similarity;
pub mod stats;
pub mod synth;
pub mod traces;

pub use ingest::{Actor, Cohort, Dataset, Post, PostKind, RetweetRef};
pub use pipeline::{Layer, RunConfig};
pub use traces::TraceKind;
