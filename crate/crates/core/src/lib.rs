//! Cut sparsification and sketching for weighted hypergraphs.
//!
//! - [`hypercore`]: hypergraphs, cuts, the exhaustive cut oracle, text I/O.
//! - [`mincut`]: deterministic minimum cut and strong connectivities.
//! - [`contract`]: randomized contraction and near-minimum cut counting.
//! - [`sparsify`]: importance-sampling sparsifier and a streaming builder.
//! - [`satsketch`]: CNF assignment-value sketches.
//! - [`maxcutlab`]: the Max-Cut gadget reduction and two-party protocol.
//! - [`experiment`]: seeded experiments reported as JSON.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contract;
pub mod error;
pub mod experiment;
pub mod generate;
pub mod hypercore;
pub mod maxcutlab;
pub mod mincut;
pub mod rng;
pub mod satsketch;
pub mod sparsify;

pub use error::{Error, Result};
pub use hypercore::{cut_weight, Cut, Hyperedge, Hypergraph};
