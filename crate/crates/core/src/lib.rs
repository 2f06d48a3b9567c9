//! Constructive machinery for finding monochromatic 3-uniform tight paths in
//! 2-coloured triangle hypergraphs of blown-up graph powers.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: simple graphs, random regular expanders, expansion
//!   certificates, set-alternating paths, powers and blow-ups.
//! - [`hypergraph`]: 3-uniform hypergraphs, 2-colourings, tight paths,
//!   monochromatic clique search and the uniformity lift.
//! - [`two_three`]: (2,3)-graphs, the witness-consuming DFS and the
//!   path-or-obstruction-sets dichotomy built on it.
//! - [`connectors`]: (2,2)/(2,1,2) connector gadgets, their disjoint triples
//!   and the auxiliary (2,3)-graph over clusters.
//! - [`extraction`]: the end-to-end pipeline (blue branch through the
//!   auxiliary graph, red branch through pruning and quadruple induction).
//! - [`harness`]: colouring strategies, batch experiments and reports.

pub mod connectors;
pub mod error;
pub mod extraction;
pub mod graph;
pub mod harness;
pub mod hypergraph;
pub mod two_three;

pub use error::{Error, HypothesisFailure, Result};
pub use graph::Graph;
pub use hypergraph::{Colour, Hypergraph3, TightPath3, TwoColoring};
pub use two_three::{TwoThreeGraph, TwoThreePath};
