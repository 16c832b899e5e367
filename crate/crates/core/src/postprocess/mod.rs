//! Postselection, keep-rate estimation and check extrapolation.

pub mod extrapolate;
pub mod overhead;
pub mod postselect;

pub use extrapolate::{
    extrapolate_checks, ExtrapolationError, ExtrapolationResult, FittedParams, SeriesPoint,
};
pub use overhead::{estimate_overhead, DetectionRule, OverheadEstimate};
pub use postselect::{
    postselect_counts, postselect_counts_iceberg, tvd, PostselectError, PostselectionReport,
};
