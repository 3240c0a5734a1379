//! Extreme value estimators for tail and extremal indices.

mod dependence;
mod extremal;
mod graph_gaps;
mod hill;
mod series;

pub use dependence::{angular_edf, distance_correlation, distance_correlation_test, AngularEdf, DcorTest};
pub use extremal::{
    default_u_grid, discrepancy_thresholds, intervals_estimator, kgaps_estimator,
    kgaps_grid_select, plateau_theta, sequence_gaps, Aggregation, DiscrepancyResult,
    EstimatorKind, ExtremalEstimate, GapEstimator, InterExceedanceTimes, PlateauResult,
    CVM_CRITICAL_95,
};
pub use graph_gaps::{graph_inter_exceedances, modified_intervals, GraphGaps};
pub use hill::{
    hill, select_k_bootstrap, BootstrapMode, BootstrapOptions, KSelection, TailEstimate,
};
pub use series::{armax_series, frechet_sample, pareto_sample};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvtError {
    #[error("k = {k} outside [1, {max}]")]
    InvalidK { k: usize, max: usize },
    #[error("{dropped} of {total} values non-positive (more than 1%)")]
    TooManyNonPositive { dropped: usize, total: usize },
    #[error("ties at the cutoff order statistic: all top values equal")]
    TiesAtCutoff,
    #[error("sample too small: {n} < {min}")]
    TooSmallSample { n: usize, min: usize },
    #[error("invalid options: {0}")]
    BadOptions(String),
    #[error("fewer than 3 exceedances")]
    TooFewExceedances,
    #[error("zero denominator in the intervals estimator")]
    ZeroDenominator,
    #[error("all K-gaps are zero")]
    AllGapsZero,
    #[error("paired samples differ in length")]
    LengthMismatch,
    #[error("no score exceeds the threshold")]
    NoExceedances,
    #[error("only one score exceeds the threshold")]
    SingleExceedance,
    #[error("no qualifying inter-exceedance path (single edges are excluded)")]
    GapSetEmpty,
    #[error("threshold grid too short: {got} < {min}")]
    GridTooShort { got: usize, min: usize },
}
