//! Localization of path-signals on graphs.
//!
//! A moving agent activates one node per time step along a connected path;
//! every node reports that activation through additive Gaussian noise. This
//! crate provides:
//!
//! - graph ingestion and generation ([`graph`]), including random geometric
//!   graphs on the unit square;
//! - partitioners and the induced super-graph ([`partition`]): square
//!   tessellation for geometric layouts, hub-shattering for graphs that fall
//!   apart once high-degree nodes are removed, and a file import path for
//!   external partitioners;
//! - observation synthesis and max-coarsening ([`signal`]);
//! - decoders ([`decoder`]): per-step argmax, the exact path-constrained
//!   maximum-likelihood decoder (a Viterbi trellis pass), its fast multiscale
//!   variant on the super-graph, and sequential multi-path peeling;
//! - computable upper bounds on the expected Hamming and destination errors
//!   of the multiscale decoder ([`bounds`]), evaluated in polynomial time by
//!   sum-product dynamic programming, plus a closed form for square-
//!   partitioned geometric graphs;
//! - slow, independent reference implementations for testing ([`oracle`]).

pub mod bounds;
pub mod decoder;
pub mod digest;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod partition;
pub mod rng;
pub mod signal;

mod normal;

pub use error::{Error, Result};
