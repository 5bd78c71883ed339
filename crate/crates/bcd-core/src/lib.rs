//! Balanced crown decompositions of vertex-weighted graphs and the
//! kernels and partition approximations built on top of them.
//!
//! Module map:
//! - [`graph`]: weighted graph, components, spanning trees
//! - [`netflow`]: Dinic max-flow, residual queries, min-cost flow
//! - [`expansion`]: fractional and rounded balanced expansions
//! - [`partition`]: st-orderings, divide-or-cut, CVP validation
//! - [`bcd`]: the `find_bcd` engine and its validators
//! - [`apps`]: separator/packing kernels, packing and BCP approximations
//! - [`oracle`]: brute-force ground truth and certificate checks
//! - [`gen`]: seeded random instance generators

pub mod apps;
pub mod bcd;
pub mod expansion;
pub mod gen;
pub mod graph;
pub mod netflow;
pub mod oracle;
pub mod partition;

pub use bcd::{find_bcd, validate_bcd, BalancedCrownDecomposition, BcdOptions, BcdOutcome};
pub use graph::{ConnectedPartition, WeightedGraph};
