//! Formal concept analysis and statistical implication mining over term-usage data.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`context`] turns a symbolic object × informant table into a binary
//!    formal context and provides the two derivation operators.
//! 2. [`lattice`] enumerates the formal concepts of a context in lectic order,
//!    builds their Hasse diagram and lists the single-premise implications.
//! 3. [`stats`] crosses term usage into 2×2 contingency tables and computes the
//!    four Loevinger indices of every pair.
//! 4. [`bayes`] bounds each index from below with a Dirichlet posterior and
//!    [`graph`] assembles the descriptive and the filtered inductive graphs.

/// Version of this library.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod bayes;
pub mod bitset;
pub mod context;
mod error;
pub mod graph;
pub mod lattice;
pub mod stats;

pub use bayes::{
    filter_graph, induce, posterior_lower_bound, BayesConfig, CredibilityBound, EdgeEvaluation,
    Induction,
};
pub use bitset::BitSet;
pub use context::{
    binarize, parse_context_csv, parse_observations, parse_symbolic_table, FormalContext,
    SymbolicTable, UsageMatrix,
};
pub use error::{Error, Result};
pub use graph::{build_descriptive_graph, DotOptions, Edge, EdgeKind, ImplicativeGraph, Stage};
pub use lattice::{
    concepts, hasse, pairwise_implications, AttributeImplication, ConceptLattice, FormalConcept,
};
pub use stats::{
    classify, contingency, h_matrix, loevinger_h, ClassificationThresholds, ContingencyTable,
    HMatrix, HQuadruple, ImplicationClass, Orientation, PairTables, Quadrant, Strength,
};
