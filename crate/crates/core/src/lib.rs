//! Partitioning directed graphs into vertex-disjoint cycles of length at least
//! three (vertex 3-cycle covers) through a QUBO formulation.
//!
//! The pipeline is:
//!
//! 1. [`graph`] builds benchmark instances: disjoint cycles plus seeded noise edges.
//! 2. [`qubo`] encodes a graph as a QUBO with the minimal penalty constants.
//! 3. [`solver`] produces low-energy assignments (exhaustive, simulated annealing)
//!    and enumerates covers directly by depth-first search.
//! 4. [`checker`] decides whether a decoded subgraph is a valid cover.
//! 5. [`experiment`] repeats the above to estimate the single-run success
//!    probability, its standard error, time-to-solution and scaling fits.

pub mod checker;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod qubo;
pub mod seed;
pub mod solver;

pub use checker::{is_cycle_cover, CoverVerdict, RejectReason};
pub use error::{Error, Result};
pub use graph::{DirectedGraph, GeneratorParams, Noise};
pub use qubo::{Assignment, PenaltyConstants, QuboProblem};
pub use solver::{AnnealParams, ExactSolution, SampleRecord, SampleSet};
