//! Hierarchy-aware scoring of classifier predictions against a weighted label
//! tree.
//!
//! Build a [`ScoringTree`] from parent/child edges, score single pairs with a
//! [`Scorer`], and aggregate confusion counts with [`evaluate`]. The
//! [`harness`] module carries the reference experiment.

pub mod aggregate;
pub mod error;
pub mod harness;
pub mod pairwise;
pub mod taxonomy;

pub use aggregate::{
    bucket_means, evaluate, flat_macro, flat_micro, flat_per_class, hf1_micro, hf_beta, micro_mean, per_class_hp_hr,
    Averaging, BucketMean, ClassFMeasure, ClassPrecisionRecall, EvaluationReport, FlatScores, Metric, MetricConfig,
    PredictionCounts,
};
pub use error::{Error, Result};
pub use pairwise::{
    ancestor_prf, f_measure, penalty, reward, score_l, score_lpp, score_pl, score_pps, score_tps, AncestorScores,
    Offset, PredictionPair, Scorer,
};
pub use taxonomy::{
    BuildMode, BuildOptions, ClassRef, EdgeSpec, NodeId, ScoringTree, NO_DETECTION_LABEL, PATH_SUM_TOLERANCE,
};
