//! Segmentation evaluation with the Rand family of indices.
//!
//! A test segmentation is compared against one or more reference
//! segmentations over pixel-pairs chosen by a deterministic moving-window
//! sampler whose window and grid scale with the mean region size of the
//! references. All index values are exact rationals.

pub mod cli;
pub mod error;
pub mod index;
pub mod io;
pub mod label_map;
pub mod oracle;
pub mod sampler;
pub mod stats;
pub mod sweep;

pub use error::{Error, Result};
pub use index::{
    epr_from_pr, evaluate_pairs, evaluate_pairs_parallel, extended_rand_index, pair_contribution,
    rand_index, Clustering, EvalReport, PairContribution, Rational,
};
pub use label_map::{GroundTruthSet, Label, LabelMap};
pub use sampler::{
    estimate_pair_count, sample_pairs, window_geometry, AwpsParams, AwpsSampler, PixelPair,
    WindowGeometry,
};
pub use stats::{granularity, region_boxes, region_count, Granularity, RegionBox};
