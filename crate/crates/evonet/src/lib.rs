//! Evolving directed networks with heavy-tailed influence scores.
//!
//! The crate grows directed multigraphs by linear preferential attachment from
//! community-structured seed networks, computes PageRank and Max-Linear
//! influence scores, and estimates / predicts the tail index and the extremal
//! index of the node-score distributions as the network evolves.
//!
//! Modules map onto the pipeline stages:
//!
//! - [`graph`] — directed multigraph storage and SNAP edge-list ingestion
//! - [`generators`] — thorny branching trees and multi-community seeds
//! - [`attachment`] — the alpha/beta/gamma linear preferential attachment schemes
//! - [`scores`] — scale-free PageRank and the Max-Linear Model
//! - [`community`] — directed Louvain, mean-excess diagnostics, node classification
//! - [`evt`] — Hill estimator with bootstrap k-selection, extremal-index
//!   estimators (intervals, K-gaps, discrepancy, plateau, graph-modified
//!   intervals), synthetic series and dependence diagnostics
//! - [`theory`] — the doubly-indexed series matrix, domino recursions and
//!   tail/extremal index prediction for classes of attached nodes
//!
//! Numeric kernels are generic over the scalar type through the [`Real`]
//! trait; `f64` is the default used by the concrete aliases below.

pub mod attachment;
pub mod community;
pub mod evt;
pub mod generators;
pub mod graph;
pub mod scalar;
pub mod scores;
pub mod stats;
pub mod theory;

pub use scalar::Real;

pub use attachment::{evolve, pa_step, EvolutionLog, PaError, PaParams, Scheme, StepRecord};
pub use community::{
    classify_new_nodes, louvain_directed, mean_excess, ClassLabel, CommunityError,
    CommunityPartition, Direction, MeanExcessCurve, NodeCode,
};
pub use evt::{
    angular_edf, armax_series, discrepancy_thresholds, distance_correlation,
    distance_correlation_test, graph_inter_exceedances, hill, intervals_estimator,
    kgaps_estimator, modified_intervals, pareto_sample, plateau_theta, select_k_bootstrap,
    sequence_gaps, EvtError, ExtremalEstimate, InterExceedanceTimes, TailEstimate,
};
pub use generators::{build_seed, build_tbt, sample_bidegree, BiDegreeSpec, GenError, SeedSpec};
pub use graph::{DirectedGraph, GraphError, NodeId, NodeOrigin};
pub use scores::{max_linear, pagerank, DanglingMode, PrParams, ScoreKind, ScoreScale, ScoreVector};
pub use theory::{
    block_permutation, domino_step, dominance_diagnostics, predict_indices, synth_matrix,
    theory_helpers, ColumnSpec, RecursionKind, RowLenLaw, SeriesMatrix, TheoryError,
    TheoryPrediction, ThetaPrediction,
};

/// Concrete aliases for the default `f64` scalar.
pub type ScoreVectorF64 = scores::ScoreVector<f64>;
/// Tail estimate over `f64` samples.
pub type TailEstimateF64 = evt::TailEstimate<f64>;
/// Series matrix over `f64` entries.
pub type SeriesMatrixF64 = theory::SeriesMatrix<f64>;
