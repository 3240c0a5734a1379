//! Modified intervals estimator for graphs.
//!
//! Nodes in a graph carry no natural enumeration, so the inter-exceedance
//! time T(u) between two exceedance nodes is taken as the edge length of a
//! simple path connecting them in the undirected view whose internal nodes
//! all stay at or below the threshold. Every such path between every
//! unordered exceedance pair contributes one T; single-edge paths are
//! excluded. Enumeration is capped at `max_len` edges with a truncation
//! counter, since unbounded simple-path enumeration is exponential on dense
//! graphs.

use super::extremal::{intervals_estimator, Aggregation, EstimatorKind, ExtremalEstimate, InterExceedanceTimes};
use super::EvtError;
use crate::graph::DirectedGraph;
use crate::graph::NodeId;
use crate::scalar::Real;
use crate::scores::ScoreVector;

/// Graph-derived inter-exceedance times.
#[derive(Clone, Debug)]
pub struct GraphGaps {
    pub gaps: InterExceedanceTimes,
    pub exceedance_nodes: Vec<NodeId>,
    /// Number of times the search abandoned a partial path at `max_len`.
    pub truncated_paths: usize,
}

/// Enumerate the inter-exceedance path lengths of `scores` over threshold
/// `u`. Paths run between unordered pairs of exceedance nodes, internal
/// nodes must not exceed, and paths longer than `max_len` edges are cut off.
pub fn graph_inter_exceedances<F: Real>(
    g: &DirectedGraph,
    scores: &ScoreVector<F>,
    u: F,
    max_len: usize,
) -> Result<GraphGaps, EvtError> {
    assert_eq!(scores.len(), g.node_count(), "scores indexed by node id");
    let n = g.node_count();
    let exceed: Vec<bool> = scores.values.iter().map(|&x| x > u).collect();
    let exceedance_nodes: Vec<NodeId> = (0..n).filter(|&i| exceed[i]).map(NodeId).collect();
    match exceedance_nodes.len() {
        0 => return Err(EvtError::NoExceedances),
        1 => return Err(EvtError::SingleExceedance),
        _ => {}
    }

    let adj = g.undirected_adjacency();
    let mut times: Vec<u64> = Vec::new();
    let mut truncated = 0usize;
    let mut on_path = vec![false; n];

    for (xi, &x) in exceedance_nodes.iter().enumerate() {
        for &y in exceedance_nodes.iter().skip(xi + 1) {
            dfs_paths(
                &adj,
                &exceed,
                x.0,
                y.0,
                max_len,
                &mut on_path,
                &mut times,
                &mut truncated,
            );
        }
    }

    if times.is_empty() {
        return Err(EvtError::GapSetEmpty);
    }
    Ok(GraphGaps {
        gaps: InterExceedanceTimes {
            times,
            exceedance_count: exceedance_nodes.len(),
            exceedance_rate: exceedance_nodes.len() as f64 / n as f64,
        },
        exceedance_nodes,
        truncated_paths: truncated,
    })
}

#[allow(clippy::too_many_arguments)]
fn dfs_paths(
    adj: &[Vec<usize>],
    exceed: &[bool],
    from: usize,
    to: usize,
    max_len: usize,
    on_path: &mut [bool],
    times: &mut Vec<u64>,
    truncated: &mut usize,
) {
    // explicit stack of (node, next-neighbor-index); depth = stack.len() - 1
    let mut stack: Vec<(usize, usize)> = vec![(from, 0)];
    on_path[from] = true;
    while !stack.is_empty() {
        let depth = stack.len() - 1;
        let top = stack.last_mut().expect("nonempty");
        let node = top.0;
        let idx = top.1;
        if idx >= adj[node].len() {
            on_path[node] = false;
            stack.pop();
            continue;
        }
        top.1 += 1;
        let nb = adj[node][idx];
        if nb == to {
            let len = depth + 1;
            if len >= 2 {
                times.push(len as u64);
            }
            continue;
        }
        if on_path[nb] || exceed[nb] {
            continue;
        }
        if depth + 1 >= max_len {
            *truncated += 1;
            continue;
        }
        on_path[nb] = true;
        stack.push((nb, 0));
    }
}

/// Algorithm composing path enumeration with the intervals estimator.
pub fn modified_intervals<F: Real>(
    g: &DirectedGraph,
    scores: &ScoreVector<F>,
    u: F,
    max_len: usize,
) -> Result<ExtremalEstimate, EvtError> {
    let gaps = graph_inter_exceedances(g, scores, u, max_len)?;
    let theta = intervals_estimator(&gaps.gaps, false)?;
    Ok(ExtremalEstimate {
        theta_hat: theta,
        estimator: EstimatorKind::ModifiedIntervals,
        threshold: u.to_f64().unwrap_or(f64::NAN),
        aggregation: Aggregation::Single,
    })
}
