//! Recognition of edge-labeled Fitch graphs.
//!
//! A map `ε` assigns every ordered pair of distinct leaves either an event
//! symbol or the no-event label `⊗`. The map is *tree-like* when some rooted
//! phylogenetic tree with labeled edges explains it: `ε(x, y)` is the symbol
//! found on the path from `lca(x, y)` down to `y`. This crate decides
//! tree-likeness in quadratic time and builds the unique least-resolved
//! explaining tree, together with the triple machinery and brute-force
//! oracles used to check those results on small inputs.

pub mod bench;
pub mod cli;
pub mod evaluate;
pub mod generalized;
pub mod io;
pub mod model;
pub mod oracle;
pub mod simple_fitch;
pub mod tree;
pub mod treeops;
pub mod triples;
pub mod verify;

pub use evaluate::{evaluate, explains, EvalError};
pub use generalized::{recognize, RecognitionReport, Violation};

pub use model::{Alphabet, FitchMap, Label, QuasiPartition, RootedTriple, Symbol, TripleSet};
pub use tree::{LabeledTree, TreeBuilder, TreeError, VertexId};
