//! Detection and constraint-checking of meso-scale network structure.
//!
//! The crate evaluates block modularity — the excess or deficit of edges
//! within and between groups relative to a null model — for communities,
//! bipartite splits, core-periphery pairs, directed hierarchies and nested
//! bipartite systems. It also carries the closed-form detectability
//! inequalities those structures obey under the configuration model, a
//! degree-corrected SBM likelihood with a greedy partition optimizer, and
//! degree-preserving ensemble significance tests.

pub mod blocks;
pub mod constraint;
pub mod error;
pub mod experiment;
pub mod generate;
pub mod graph;
pub mod heatmap;
pub mod infer;
pub mod matrix;
pub mod modularity;
pub mod nestedness;
pub mod nullmodel;
pub mod partition;
pub mod pattern;

pub use blocks::{block_summary, BlockSummary};
pub use error::{MesoError, Result};
pub use graph::{load_edge_list, Graph};
pub use matrix::SquareMatrix;
pub use modularity::{
    block_modularity, block_modularity_weighted, newman_modularity, q_matrix, BlockMatrix, QMatrix,
};
pub use nullmodel::{expected_blocks, NullModel};
pub use partition::Partition;
