//! Reading and writing trees and summaries.

pub mod mds;
pub mod newick;
pub mod ranked;
pub mod text;

pub use mds::{classical_mds, MdsEmbedding};
pub use newick::{parse_newick, parse_newick_forest, LabelledTree, NewickError, NewickErrorKind, Node};
pub use ranked::{genealogy_to_tree, hetero_to_tree, shape_to_tree, to_ranked, RankOptions, Ranked};
pub use text::{
    parse_fmatrices, parse_trees, write_code, write_fmatrix, write_genealogy, write_hetero, write_real_matrix, TreeSet,
};
