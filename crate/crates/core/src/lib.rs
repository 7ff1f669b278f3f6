//! Directed-network assortativity toolkit: the four directed degree-degree
//! assortativity coefficients, LP-based attainability checks and bounds, and
//! degree-preserving rewiring toward attainable targets.

pub mod assort;
pub mod cli;
pub mod error;
pub mod eta;
pub mod fit;
pub mod gains;
pub mod generators;
pub mod graph;
pub mod lp;
pub mod rewire;

pub use assort::{assortativity_of_graph, AssortProfile, DegreeType, EdgeEndDistributions, EdgeMixMatrix, TypePair};
pub use error::{Error, Result};
pub use eta::{coefficient_bounds, solve_target_eta, AssortBounds, EtaMethod, EtaOutcome, EtaProblem, Interval};
pub use graph::{DegreePair, DegreePairDist, DirectedGraph, NodeId};
