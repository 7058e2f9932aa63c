//! Procedures built on top of the COOT solver.

mod blocks;
mod cce;
mod cocluster;
mod election;
mod hda;

pub use blocks::{generate_blocks, unequal_proportions, BlockConfig, BlockData, Preset, ILL_SEPARATED, WELL_SEPARATED};
pub use cce::{cce, misclassification_rate};
pub use cocluster::{cocluster, summary_update, CoClustering, CoclusterConfig, SUMMARY_TOL};
pub use election::{election_distance, Election, ElectionDistance};
pub use hda::{
    auto_penalty, hda, mask_semisupervised_cost, propagate_labels, HdaConfig, HdaResult, LabelMatrix, Penalty,
    Propagation,
};
