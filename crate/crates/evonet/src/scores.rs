//! Node influence scores: scale-free PageRank and the Max-Linear Model.
//!
//! PageRank iterates
//!
//! ```text
//! R_i <- sum_{j -> i} (c / D_j) R_j + (1 - c),        R^(0) = 1
//! ```
//!
//! in the scale-free normalization (scores sum to n at convergence in
//! redistribute mode). The Max-Linear Model iterates the max analogue
//!
//! ```text
//! X_i <- max(c * max_{j -> i} X_j, q_i),              X^(0) = q
//! ```
//!
//! which is a contraction for c < 1 and always converges. Parallel edges
//! contribute multiplicity-weighted terms to the PageRank sum; for the max
//! recursion multiplicity is irrelevant.

use thiserror::Error;

use crate::graph::{DirectedGraph, NodeId};
use crate::scalar::{cast, Real};

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error("empty graph")]
    EmptyGraph,
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("personalization must be positive and of graph length")]
    BadPersonalization,
}

/// Treatment of dangling nodes (out-degree zero) in the PageRank update.
#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DanglingMode {
    /// Iterate the update literally; dangling mass is lost.
    Literal,
    /// Dangling nodes spread c * R_j / n to every node.
    Redistribute,
}

/// PageRank / max-recursion parameters.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct PrParams<F: Real = f64> {
    pub c: F,
    pub tol: F,
    pub max_iter: usize,
    pub dangling_mode: DanglingMode,
}

impl<F: Real> Default for PrParams<F> {
    fn default() -> Self {
        Self {
            c: cast(0.85),
            tol: cast(1e-10),
            max_iter: 1000,
            dangling_mode: DanglingMode::Literal,
        }
    }
}

impl<F: Real> PrParams<F> {
    fn validate(&self) -> Result<(), ScoreError> {
        if !(self.c > F::zero() && self.c < F::one()) {
            return Err(ScoreError::BadParams("damping factor must lie in (0,1)".into()));
        }
        if !(self.tol > F::zero()) {
            return Err(ScoreError::BadParams("tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreKind {
    PageRank,
    Mlm,
}

/// Normalization of a score vector: scale-free sums to ~n, probability to ~1.
#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreScale {
    ScaleFree,
    Probability,
}

/// Per-node non-negative influence values.
#[derive(Clone, Debug)]
pub struct ScoreVector<F: Real = f64> {
    pub values: Vec<F>,
    pub kind: ScoreKind,
    pub scale: ScoreScale,
}

impl<F: Real> ScoreVector<F> {
    pub fn get(&self, v: NodeId) -> F {
        self.values[v.0]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Convert scale-free values to the probability normalization.
    pub fn to_probability(mut self) -> Self {
        if self.scale == ScoreScale::ScaleFree {
            let n: F = cast(self.values.len() as f64);
            for v in &mut self.values {
                *v = *v / n;
            }
            self.scale = ScoreScale::Probability;
        }
        self
    }

    /// CSV rows `node_id,score` in node-id order.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "node_id,score")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{i},{v}")?;
        }
        Ok(())
    }
}

/// PageRank result: the scores plus convergence information. A run that hits
/// `max_iter` is returned with `converged = false` rather than failing.
#[derive(Clone, Debug)]
pub struct PrOutcome<F: Real = f64> {
    pub scores: ScoreVector<F>,
    pub iterations: usize,
    pub converged: bool,
}

/// Scale-free PageRank by fixed-point iteration from R = 1.
pub fn pagerank<F: Real>(g: &DirectedGraph, p: &PrParams<F>) -> Result<PrOutcome<F>, ScoreError> {
    p.validate()?;
    let n = g.node_count();
    if n == 0 {
        return Err(ScoreError::EmptyGraph);
    }
    let n_f: F = cast(n as f64);
    let base = F::one() - p.c;
    let mut prev = vec![F::one(); n];
    let mut next = vec![F::zero(); n];
    let out_deg: Vec<F> = g.node_ids().map(|v| cast(g.out_degree(v) as f64)).collect();
    let dangling: Vec<usize> = g
        .node_ids()
        .filter(|&v| g.out_degree(v) == 0)
        .map(|v| v.0)
        .collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < p.max_iter {
        iterations += 1;
        let dangling_share = match p.dangling_mode {
            DanglingMode::Literal => F::zero(),
            DanglingMode::Redistribute => {
                let s: F = dangling.iter().map(|&j| prev[j]).sum();
                p.c * s / n_f
            }
        };
        for v in next.iter_mut() {
            *v = base + dangling_share;
        }
        for &(src, dst) in g.edges() {
            next[dst.0] += p.c * prev[src.0] / out_deg[src.0];
        }
        let mut diff = F::zero();
        for i in 0..n {
            let d = (next[i] - prev[i]).abs();
            if d > diff {
                diff = d;
            }
        }
        std::mem::swap(&mut prev, &mut next);
        if diff < p.tol {
            converged = true;
            break;
        }
    }

    Ok(PrOutcome {
        scores: ScoreVector { values: prev, kind: ScoreKind::PageRank, scale: ScoreScale::ScaleFree },
        iterations,
        converged,
    })
}

/// Max-Linear Model scores: the minimal solution of the max recursion with
/// personalization `q` (all entries must be positive).
pub fn max_linear<F: Real>(
    g: &DirectedGraph,
    p: &PrParams<F>,
    q: &[F],
) -> Result<ScoreVector<F>, ScoreError> {
    p.validate()?;
    let n = g.node_count();
    if n == 0 {
        return Err(ScoreError::EmptyGraph);
    }
    if q.len() != n || q.iter().any(|&v| !(v > F::zero())) {
        return Err(ScoreError::BadPersonalization);
    }
    let mut prev = q.to_vec();
    let mut next = vec![F::zero(); n];
    loop {
        for v in g.node_ids() {
            let mut m = F::zero();
            for &j in g.in_neighbors(v) {
                if prev[j.0] > m {
                    m = prev[j.0];
                }
            }
            let cand = p.c * m;
            next[v.0] = if cand > q[v.0] { cand } else { q[v.0] };
        }
        let mut diff = F::zero();
        for i in 0..n {
            let d = (next[i] - prev[i]).abs();
            if d > diff {
                diff = d;
            }
        }
        std::mem::swap(&mut prev, &mut next);
        if diff < p.tol {
            break;
        }
    }
    Ok(ScoreVector { values: prev, kind: ScoreKind::Mlm, scale: ScoreScale::ScaleFree })
}
