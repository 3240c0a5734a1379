//! Doubly-indexed series matrices, the domino recursions, and prediction of
//! the tail and extremal indices of evolved columns.
//!
//! The matrix holds ragged rows `Y_{i,1..N_i}` with per-row personalization
//! `Q_i`. One evolution iteration replaces column j by the damped suffix
//! aggregate of row i from column j on:
//!
//! ```text
//! sum kind:  Y'_{i,j} = c * (Y_{i,j} + ... + Y_{i,N_i}) + Q_i
//! max kind:  X'_{i,j} = max(c * max(X_{i,j}, ..., X_{i,N_i}), Q_i)
//! ```
//!
//! Columns inherit the tail index of the matching seed column, and under the
//! dominance conditions also its extremal index; `predict_indices` encodes
//! those rules for classes of attached nodes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::evt::{armax_series, TailEstimate};
use crate::scalar::{cast, Real};

#[derive(Debug, Error)]
pub enum TheoryError {
    #[error("tail ordering requires k1 < k, got k1 = {k1}, k = {k}")]
    InvalidOrdering { k1: f64, k: f64 },
    #[error("class {0} links to no community")]
    NoLinkedCommunity(usize),
    #[error("empty matrix")]
    EmptyMatrix,
}

/// Aggregation used by a domino step.
#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecursionKind {
    Sum,
    Max,
}

/// Declared properties of one column of the series scheme.
#[derive(Clone, Copy, Debug)]
pub struct ColumnSpec<F: Real = f64> {
    pub tail_index: F,
    pub extremal_index: f64,
    pub stationary: bool,
}

/// Ragged doubly-indexed array with per-row personalization and per-column
/// metadata.
#[derive(Clone, Debug)]
pub struct SeriesMatrix<F: Real = f64> {
    pub rows: Vec<Vec<F>>,
    pub q: Vec<F>,
    pub column_meta: Vec<ColumnSpec<F>>,
}

impl<F: Real> SeriesMatrix<F> {
    /// Values of column `j` (0-based) over the rows long enough to have it.
    pub fn column(&self, j: usize) -> Vec<F> {
        self.rows.iter().filter_map(|r| r.get(j).copied()).collect()
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }
}

/// One evolution iteration of the domino recursion; row lengths are kept.
pub fn domino_step<F: Real>(m: &SeriesMatrix<F>, c: F, kind: RecursionKind) -> SeriesMatrix<F> {
    let rows = m
        .rows
        .iter()
        .zip(&m.q)
        .map(|(row, &q)| {
            let mut out = vec![F::zero(); row.len()];
            match kind {
                RecursionKind::Sum => {
                    let mut suffix = F::zero();
                    for j in (0..row.len()).rev() {
                        suffix += row[j];
                        out[j] = c * suffix + q;
                    }
                }
                RecursionKind::Max => {
                    let mut suffix = F::neg_infinity();
                    for j in (0..row.len()).rev() {
                        if row[j] > suffix {
                            suffix = row[j];
                        }
                        let damped = c * suffix;
                        out[j] = if damped > q { damped } else { q };
                    }
                }
            }
            out
        })
        .collect();
    SeriesMatrix { rows, q: m.q.clone(), column_meta: m.column_meta.clone() }
}

/// Row-length law for synthetic matrices.
#[derive(Clone, Copy, Debug)]
pub enum RowLenLaw {
    Fixed(usize),
    /// Uniform on `[lo, hi]`, truncated to the available column count.
    Uniform(usize, usize),
}

/// Draw a synthetic series matrix: column i is Pareto(k_i)-tailed, modulated
/// through an ARMAX driver when its extremal index is below one, so column i
/// has tail index `k_i` and extremal index `theta_i` by construction.
/// Personalization Q is iid uniform on (0, 1).
pub fn synth_matrix<F: Real>(
    specs: &[ColumnSpec<F>],
    n_rows: usize,
    law: RowLenLaw,
    rng_seed: u64,
) -> SeriesMatrix<F> {
    assert!(!specs.is_empty(), "need at least one column spec");
    let mut rng = ChaCha12Rng::seed_from_u64(rng_seed);
    // per-column series, drawn column-major so each column is a stationary
    // sequence in the row index
    let columns: Vec<Vec<F>> = specs
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let sub_seed = rng_seed ^ (i as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
            let k = spec.tail_index.to_f64().expect("finite tail index");
            if spec.extremal_index >= 1.0 {
                crate::evt::pareto_sample::<f64>(n_rows, k, sub_seed)
                    .into_iter()
                    .map(|x| cast(x))
                    .collect()
            } else {
                // unit-Frechet ARMAX has extremal index theta; the monotone
                // transform z^(1/k) moves the tail index to k and keeps theta
                armax_series::<f64>(n_rows, spec.extremal_index, sub_seed)
                    .into_iter()
                    .map(|z| cast(z.powf(1.0 / k)))
                    .collect()
            }
        })
        .collect();

    let mut rows = Vec::with_capacity(n_rows);
    let mut q = Vec::with_capacity(n_rows);
    for i in 0..n_rows {
        let len = match law {
            RowLenLaw::Fixed(d) => d.min(specs.len()).max(1),
            RowLenLaw::Uniform(lo, hi) => {
                let hi = hi.min(specs.len()).max(1);
                let lo = lo.clamp(1, hi);
                rng.gen_range(lo..=hi)
            }
        };
        rows.push((0..len).map(|j| columns[j][i]).collect());
        q.push(cast(rng.gen::<f64>()));
    }
    SeriesMatrix { rows, q, column_meta: specs.to_vec() }
}

/// Helper quantities for the dominance conditions: `chi0`, `l_n = floor(n^chi)`
/// and `d_n = min(C, l_n)`.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct TheoryHelpers {
    pub chi0: f64,
    pub chi_used: f64,
    pub l_n: u64,
    pub d_n: f64,
}

/// Compute `chi0 = (k - k1) / (k1 (k + 1))` and the derived sequence values.
/// `chi` defaults to `chi0 / 2` when not given.
pub fn theory_helpers(
    k1: f64,
    k: f64,
    n: u64,
    c_bound: f64,
    chi: Option<f64>,
) -> Result<TheoryHelpers, TheoryError> {
    if !(k1 > 0.0) || k1 >= k {
        return Err(TheoryError::InvalidOrdering { k1, k });
    }
    assert!(n >= 2, "n must be at least 2");
    assert!(c_bound > 1.0, "C must exceed 1");
    let chi0 = (k - k1) / (k1 * (k + 1.0));
    let chi_used = chi.unwrap_or(chi0 / 2.0);
    let l_n = (n as f64).powf(chi_used).floor() as u64;
    let d_n = c_bound.min(l_n as f64);
    Ok(TheoryHelpers { chi0, chi_used, l_n, d_n })
}

/// Predicted theta: a value, or explicitly undefined when the stationarity
/// or dependence conditions fail. Never silently 1.
#[derive(Clone, Copy, PartialEq, Debug, serde::Serialize)]
#[serde(untagged)]
pub enum ThetaPrediction {
    Value(f64),
    /// Serialized as the string "undefined".
    Undefined(&'static str),
}

impl ThetaPrediction {
    pub fn undefined() -> Self {
        ThetaPrediction::Undefined("undefined")
    }

    pub fn value(self) -> Option<f64> {
        match self {
            ThetaPrediction::Value(v) => Some(v),
            ThetaPrediction::Undefined(_) => None,
        }
    }
}

/// Which statement backs a prediction: the unique-dominating-column case,
/// the weakly-dependent multi-column case, or the max-ordering argument
/// alone (MLM only).
#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize)]
pub enum PredictionBasis {
    #[serde(rename = "Prop1(i)")]
    UniqueDominating,
    #[serde(rename = "Prop1(ii)")]
    WeaklyDependent,
    #[serde(rename = "T3")]
    MaxOrdering,
}

/// Per-community EVT summary feeding the prediction.
#[derive(Clone, Debug)]
pub struct CommunityEvtSummary<F: Real = f64> {
    pub tail: TailEstimate<F>,
    pub theta: f64,
    pub stationary: bool,
    pub sample_max: F,
}

/// Dependence gate for multi-dominating predictions: whether the pairwise
/// joint-exceedance diagnostic passed (A1/A2 surrogate) and whether the
/// pairwise dependence looks homogeneous.
#[derive(Clone, Copy, Debug)]
pub struct DependenceGate {
    pub weak_dependence_ok: bool,
    pub homogeneous_ok: bool,
}

impl DependenceGate {
    pub fn pass() -> Self {
        Self { weak_dependence_ok: true, homogeneous_ok: true }
    }
}

/// Prediction for one class of newly attached nodes.
#[derive(Clone, Debug)]
pub struct TheoryPrediction<F: Real = f64> {
    pub class_index: usize,
    pub k_pred: F,
    /// Extremal index of the Max-Linear scores of the class.
    pub theta_mlm: ThetaPrediction,
    /// Extremal index of the PageRank scores of the class.
    pub theta_pr: ThetaPrediction,
    /// Communities (0-based) within tie tolerance of the minimum tail index.
    pub dominating_set: Vec<usize>,
    pub basis: PredictionBasis,
}

impl<F: Real + serde::Serialize> serde::Serialize for TheoryPrediction<F> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("TheoryPrediction", 7)?;
        s.serialize_field("class", &self.class_index)?;
        s.serialize_field("k_pred", &self.k_pred)?;
        // theta_pred carries the PageRank-side prediction; the per-model
        // values stay available in theta_mlm / theta_pr
        s.serialize_field("theta_pred", &self.theta_pr)?;
        s.serialize_field("theta_mlm", &self.theta_mlm)?;
        s.serialize_field("theta_pr", &self.theta_pr)?;
        s.serialize_field("dominating_set", &self.dominating_set)?;
        s.serialize_field("basis", &self.basis)?;
        s.end()
    }
}

/// Predict tail and extremal indices per class. `class_links[c]` lists the
/// community indices class c links to (0-based). The predicted tail index is
/// the minimum estimate over linked communities; the dominating set collects
/// the linked communities whose confidence interval overlaps the minimum's.
pub fn predict_indices<F: Real>(
    communities: &[CommunityEvtSummary<F>],
    class_links: &[(usize, Vec<usize>)],
    gate: DependenceGate,
) -> Result<Vec<TheoryPrediction<F>>, TheoryError> {
    let mut out = Vec::with_capacity(class_links.len());
    for (class_index, links) in class_links {
        if links.is_empty() {
            return Err(TheoryError::NoLinkedCommunity(*class_index));
        }
        let argmin = *links
            .iter()
            .min_by(|&&a, &&b| {
                communities[a]
                    .tail
                    .alpha_hat
                    .partial_cmp(&communities[b].tail.alpha_hat)
                    .expect("finite tail estimates")
            })
            .expect("nonempty links");
        let min_tail = communities[argmin].tail.alpha_hat;
        let min_ci = communities[argmin].tail.ci;
        // tie tolerance: bootstrap CI overlap with the minimum
        let dominating: Vec<usize> = links
            .iter()
            .copied()
            .filter(|&c| {
                let ci = communities[c].tail.ci;
                ci.0 <= min_ci.1 && min_ci.0 <= ci.1
            })
            .collect();

        let prediction = if dominating.len() == 1 {
            let c = dominating[0];
            let theta = if communities[c].stationary {
                ThetaPrediction::Value(communities[c].theta)
            } else {
                ThetaPrediction::undefined()
            };
            TheoryPrediction {
                class_index: *class_index,
                k_pred: min_tail,
                theta_mlm: theta,
                theta_pr: theta,
                dominating_set: dominating,
                basis: PredictionBasis::UniqueDominating,
            }
        } else {
            // several dominating communities: order them by sample maxima;
            // the one with the largest maximum drives the MLM extremal index
            let top = *dominating
                .iter()
                .max_by(|&&a, &&b| {
                    communities[a]
                        .sample_max
                        .partial_cmp(&communities[b].sample_max)
                        .expect("finite maxima")
                })
                .expect("nonempty dominating set");
            let all_stationary = dominating.iter().all(|&c| communities[c].stationary);
            let theta_mlm = if all_stationary {
                ThetaPrediction::Value(communities[top].theta)
            } else {
                ThetaPrediction::undefined()
            };
            let pr_ok = all_stationary && gate.weak_dependence_ok && gate.homogeneous_ok;
            let theta_pr = if pr_ok { theta_mlm } else { ThetaPrediction::undefined() };
            TheoryPrediction {
                class_index: *class_index,
                k_pred: min_tail,
                theta_mlm,
                theta_pr,
                dominating_set: dominating,
                basis: if pr_ok {
                    PredictionBasis::WeaklyDependent
                } else {
                    PredictionBasis::MaxOrdering
                },
            }
        };
        out.push(prediction);
    }
    Ok(out)
}

/// Pairwise joint-exceedance diagnostics over column series at threshold u.
#[derive(Clone, Debug)]
pub struct DominanceReport {
    /// `ratios[i][j] = P{X_i > u, X_j > u} / min(P{X_i > u}, P{X_j > u})`.
    pub ratios: Vec<Vec<f64>>,
    pub max_ratio: f64,
    /// Spread (max - min) of the off-diagonal ratios: the homogeneity check.
    pub ratio_spread: f64,
    /// True when every pairwise ratio is at most the weak-dependence
    /// tolerance (0.1 diagnostic default).
    pub weak_dependence_ok: bool,
    /// Column maxima in descending order as (column, max).
    pub maxima_ranked: Vec<(usize, f64)>,
    /// Column with the largest sample maximum.
    pub a4_candidate: usize,
}

/// Diagnostic tolerance for "weak dependence" of joint exceedances.
pub const WEAK_DEPENDENCE_TOLERANCE: f64 = 0.1;

/// Compute the pairwise joint-exceedance ratios and the maxima ordering.
pub fn dominance_diagnostics<F: Real>(columns: &[Vec<F>], u: F) -> DominanceReport {
    assert!(columns.len() >= 2, "need at least two columns");
    let d = columns.len();
    let exceed: Vec<Vec<bool>> = columns
        .iter()
        .map(|col| col.iter().map(|&x| x > u).collect())
        .collect();
    let probs: Vec<f64> = exceed
        .iter()
        .map(|e| e.iter().filter(|&&b| b).count() as f64 / e.len().max(1) as f64)
        .collect();

    let mut ratios = vec![vec![0.0; d]; d];
    let mut max_ratio = 0.0f64;
    let mut min_ratio = f64::INFINITY;
    for i in 0..d {
        for j in (i + 1)..d {
            let n = exceed[i].len().min(exceed[j].len());
            let joint = (0..n).filter(|&t| exceed[i][t] && exceed[j][t]).count() as f64
                / n.max(1) as f64;
            let denom = probs[i].min(probs[j]);
            let r = if denom > 0.0 { joint / denom } else { 0.0 };
            ratios[i][j] = r;
            ratios[j][i] = r;
            max_ratio = max_ratio.max(r);
            min_ratio = min_ratio.min(r);
        }
    }
    let ratio_spread = if min_ratio.is_finite() { max_ratio - min_ratio } else { 0.0 };

    let mut maxima_ranked: Vec<(usize, f64)> = columns
        .iter()
        .enumerate()
        .map(|(i, col)| {
            let m = col
                .iter()
                .fold(f64::NEG_INFINITY, |acc, &x| acc.max(x.to_f64().unwrap_or(f64::NAN)));
            (i, m)
        })
        .collect();
    maxima_ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite maxima"));
    let a4_candidate = maxima_ranked[0].0;

    DominanceReport {
        ratios,
        max_ratio,
        ratio_spread,
        weak_dependence_ok: max_ratio <= WEAK_DEPENDENCE_TOLERANCE,
        maxima_ranked,
        a4_candidate,
    }
}

/// Reorder rows into blocks by the first column holding a non-zero entry:
/// block j collects the rows whose leftmost non-zero is column j. Returns
/// the row permutation (new order of old indices) and each row's block.
pub fn block_permutation<F: Real>(m: &SeriesMatrix<F>) -> (Vec<usize>, Vec<usize>) {
    let block_of: Vec<usize> = m
        .rows
        .iter()
        .map(|row| row.iter().position(|&x| x != F::zero()).unwrap_or(row.len()))
        .collect();
    let mut perm: Vec<usize> = (0..m.rows.len()).collect();
    perm.sort_by_key(|&i| (block_of[i], i));
    (perm, block_of)
}
