//! Seed-network generators: thorny branching trees from bi-degree sequences
//! and multi-community seeds joined by sparse cross edges.
//!
//! A thorny branching tree (TBT) is a branching tree in which every non-root
//! node keeps one out-edge to its parent; the remaining in/out stubs are
//! matched uniformly at random as in the configuration model.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::graph::{DirectedGraph, NodeId};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("degenerate spec: {0}")]
    DegenerateSpec(String),
    #[error("degree sequences invalid: {0}")]
    BadDegreeSequences(String),
    #[error("stub matching failed to avoid self-loops within the retry budget")]
    StubMatchFailure,
}

/// Target bi-degree distribution for one TBT component.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct BiDegreeSpec {
    pub n: usize,
    pub iota_in: f64,
    pub iota_out: f64,
    pub rng_seed: u64,
}

impl BiDegreeSpec {
    fn validate(&self) -> Result<(), GenError> {
        if self.n < 2 {
            return Err(GenError::DegenerateSpec(format!("n = {} < 2", self.n)));
        }
        if !(self.iota_in > 1.0) || !(self.iota_out > 1.0) {
            return Err(GenError::DegenerateSpec(
                "tail indices must exceed 1 (finite-mean degrees)".into(),
            ));
        }
        Ok(())
    }
}

/// Multi-component seed: disjoint TBTs plus uniformly random cross edges.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct SeedSpec {
    pub components: Vec<BiDegreeSpec>,
    pub cross_edges: usize,
}

/// Seed graph with per-node component labels.
#[derive(Debug)]
pub struct SeedGraph {
    pub graph: DirectedGraph,
    pub component_of: Vec<usize>,
}

/// Perturbations applied while realizing a degree sequence exactly was
/// impossible (tree spanning or self-loop avoidance).
#[derive(Debug, Default, Clone, Copy)]
pub struct TbtReport {
    /// Tree edges attached without an available parent in-stub.
    pub forced_tree_edges: usize,
    /// Stubs left unmatched after pairing.
    pub dropped_stubs: usize,
}

/// Discretized Pareto on {1, 2, ...}: `D = ceil(U^(-1/iota)) - 1` so that
/// `P(D >= m) = (m - 1)^(-iota)` for m >= 2.
fn pareto_degree(rng: &mut impl Rng, iota: f64) -> usize {
    let u: f64 = 1.0 - rng.gen::<f64>(); // in (0, 1]
    let x = u.powf(-1.0 / iota);
    ((x.ceil() as usize).saturating_sub(1)).max(1)
}

/// Draw paired in/out degree sequences with power-law tails and equal sums.
/// The smaller-sum side is incremented at uniformly chosen positions until
/// the sums match.
pub fn sample_bidegree(spec: &BiDegreeSpec) -> Result<(Vec<usize>, Vec<usize>), GenError> {
    spec.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(spec.rng_seed);
    let mut din: Vec<usize> = (0..spec.n).map(|_| pareto_degree(&mut rng, spec.iota_in)).collect();
    let mut dout: Vec<usize> = (0..spec.n).map(|_| pareto_degree(&mut rng, spec.iota_out)).collect();
    let mut sin: usize = din.iter().sum();
    let mut sout: usize = dout.iter().sum();
    while sin < sout {
        din[rng.gen_range(0..spec.n)] += 1;
        sin += 1;
    }
    while sout < sin {
        dout[rng.gen_range(0..spec.n)] += 1;
        sout += 1;
    }
    Ok((din, dout))
}

/// Build a TBT from a bi-degree sequence.
///
/// The tree skeleton is grown breadth-first: node 0 is the root and each
/// subsequent node spends one out-stub on an edge to its parent, consuming
/// one of the parent's in-stubs. Remaining stubs are matched uniformly at
/// random, resampling to avoid self-loops.
pub fn build_tbt(
    in_deg: &[usize],
    out_deg: &[usize],
    rng_seed: u64,
) -> Result<(DirectedGraph, TbtReport), GenError> {
    if in_deg.len() != out_deg.len() {
        return Err(GenError::BadDegreeSequences("length mismatch".into()));
    }
    let n = in_deg.len();
    if n < 2 {
        return Err(GenError::DegenerateSpec(format!("n = {n} < 2")));
    }
    let sin: usize = in_deg.iter().sum();
    let sout: usize = out_deg.iter().sum();
    if sin != sout {
        return Err(GenError::BadDegreeSequences(format!(
            "degree sums differ: in {sin} vs out {sout}"
        )));
    }

    let mut rng = ChaCha12Rng::seed_from_u64(rng_seed);
    let mut g = DirectedGraph::new();
    for _ in 0..n {
        g.add_node(0);
    }
    let mut report = TbtReport::default();

    // Tree phase: BFS over parents; node `next` points to its parent.
    let mut in_rem = in_deg.to_vec();
    let mut out_rem = out_deg.to_vec();
    let mut queue: std::collections::VecDeque<usize> = std::collections::VecDeque::new();
    queue.push_back(0);
    let mut next = 1usize;
    while next < n {
        let parent = match queue.pop_front() {
            Some(p) if in_rem[p] > 0 => p,
            Some(_) => continue,
            None => {
                // no in-stubs left anywhere ahead: force-attach to keep the
                // skeleton spanning, perturbing the parent's realized degree
                let p = rng.gen_range(0..next);
                report.forced_tree_edges += 1;
                g.add_edge(NodeId(next), NodeId(p)).expect("distinct ids");
                out_rem[next] = out_rem[next].saturating_sub(1);
                queue.push_back(next);
                next += 1;
                continue;
            }
        };
        while in_rem[parent] > 0 && next < n {
            g.add_edge(NodeId(next), NodeId(parent)).expect("distinct ids");
            in_rem[parent] -= 1;
            if out_rem[next] == 0 {
                report.forced_tree_edges += 1; // requested out-degree 0, parent edge is extra
            } else {
                out_rem[next] -= 1;
            }
            queue.push_back(next);
            next += 1;
        }
    }

    // Configuration-model phase on the remaining stubs.
    let mut in_stubs: Vec<usize> = Vec::with_capacity(sin);
    let mut out_stubs: Vec<usize> = Vec::with_capacity(sout);
    for v in 0..n {
        in_stubs.extend(std::iter::repeat_n(v, in_rem[v]));
        out_stubs.extend(std::iter::repeat_n(v, out_rem[v]));
    }
    let m = in_stubs.len().min(out_stubs.len());
    report.dropped_stubs = in_stubs.len().max(out_stubs.len()) - m;
    out_stubs.shuffle(&mut rng);
    in_stubs.shuffle(&mut rng);

    let mut budget = 100usize.saturating_mul(m.max(1));
    for t in 0..m {
        while out_stubs[t] == in_stubs[t] {
            if budget == 0 {
                return Err(GenError::StubMatchFailure);
            }
            budget -= 1;
            let s = rng.gen_range(0..m);
            if s != t && out_stubs[s] != in_stubs[t] && out_stubs[t] != in_stubs[s] {
                out_stubs.swap(t, s);
            } else if m == 1 {
                return Err(GenError::StubMatchFailure);
            }
        }
    }
    for t in 0..m {
        g.add_edge(NodeId(out_stubs[t]), NodeId(in_stubs[t]))
            .expect("self-loops resolved by swapping");
    }

    Ok((g, report))
}

/// Build a multi-component seed: disjoint TBTs, then `cross_edges` directed
/// edges between uniformly chosen ordered pairs of nodes from distinct
/// components. `cross_seed` drives the cross-edge stream.
pub fn build_seed(spec: &SeedSpec, cross_seed: u64) -> Result<SeedGraph, GenError> {
    if spec.components.is_empty() {
        return Err(GenError::DegenerateSpec("no components".into()));
    }
    let mut graph = DirectedGraph::new();
    let mut component_of: Vec<usize> = Vec::new();
    for (ci, comp) in spec.components.iter().enumerate() {
        let (din, dout) = sample_bidegree(comp)?;
        let (tbt, _) = build_tbt(&din, &dout, comp.rng_seed ^ 0x7b7_1e55)?;
        let offset = graph.node_count();
        for _ in 0..tbt.node_count() {
            graph.add_node(0);
            component_of.push(ci);
        }
        for &(s, d) in tbt.edges() {
            graph
                .add_edge(NodeId(s.0 + offset), NodeId(d.0 + offset))
                .expect("offset edges valid");
        }
    }

    if spec.cross_edges > 0 && spec.components.len() < 2 {
        return Err(GenError::DegenerateSpec(
            "cross edges require at least two components".into(),
        ));
    }
    let n = graph.node_count();
    let mut rng = ChaCha12Rng::seed_from_u64(cross_seed);
    let mut added = 0;
    while added < spec.cross_edges {
        let s = rng.gen_range(0..n);
        let d = rng.gen_range(0..n);
        if component_of[s] == component_of[d] {
            continue;
        }
        graph.add_edge(NodeId(s), NodeId(d)).expect("distinct components");
        added += 1;
    }

    Ok(SeedGraph { graph, component_of })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evt::hill;
    use crate::stats::median;

    #[test]
    fn bidegree_sums_match_exactly() {
        for seed in 0..20 {
            let spec = BiDegreeSpec { n: 200, iota_in: 2.5, iota_out: 1.8, rng_seed: seed };
            let (din, dout) = sample_bidegree(&spec).unwrap();
            assert_eq!(din.iter().sum::<usize>(), dout.iter().sum::<usize>());
            assert!(din.iter().all(|&d| d >= 1));
            assert!(dout.iter().all(|&d| d >= 1));
        }
    }

    #[test]
    fn bidegree_light_tail_two_nodes() {
        let spec = BiDegreeSpec { n: 2, iota_in: 50.0, iota_out: 50.0, rng_seed: 1 };
        let (din, dout) = sample_bidegree(&spec).unwrap();
        assert_eq!(din.iter().sum::<usize>(), dout.iter().sum::<usize>());
    }

    #[test]
    fn bidegree_is_seed_deterministic() {
        let spec = BiDegreeSpec { n: 500, iota_in: 3.8, iota_out: 2.0, rng_seed: 99 };
        assert_eq!(sample_bidegree(&spec).unwrap(), sample_bidegree(&spec).unwrap());
    }

    #[test]
    fn bidegree_rejects_degenerate() {
        let spec = BiDegreeSpec { n: 1, iota_in: 2.0, iota_out: 2.0, rng_seed: 0 };
        assert!(matches!(sample_bidegree(&spec), Err(GenError::DegenerateSpec(_))));
    }

    /// Monte-Carlo oracle over seeds: Hill estimate of sampled out-degrees
    /// recovers the target index within a tolerant band.
    #[test]
    fn bidegree_out_tail_index_recovered() {
        let mut hills = Vec::new();
        for seed in 0..50 {
            let spec = BiDegreeSpec { n: 800, iota_in: 3.8, iota_out: 2.0, rng_seed: seed };
            let (_, dout) = sample_bidegree(&spec).unwrap();
            let sample: Vec<f64> = dout.iter().map(|&d| d as f64).collect();
            hills.push(hill(&sample, 80).unwrap());
        }
        let med = median(&hills);
        assert!((1.6..=2.6).contains(&med), "median Hill {med}");
    }

    #[test]
    fn tbt_two_nodes_matches_hand_enumeration() {
        // sequences (1,1)/(1,1): parent edge 1 -> 0 consumes one out-stub of
        // node 1 and one in-stub of node 0; the single remaining pair is the
        // out-stub of node 0 and the in-stub of node 1, forced edge 0 -> 1.
        let (g, rep) = build_tbt(&[1, 1], &[1, 1], 7).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.in_degree(NodeId(0)), 1);
        assert_eq!(g.in_degree(NodeId(1)), 1);
        assert_eq!(g.out_degree(NodeId(0)), 1);
        assert_eq!(g.out_degree(NodeId(1)), 1);
        assert_eq!(rep.forced_tree_edges, 0);
        assert_eq!(rep.dropped_stubs, 0);
    }

    #[test]
    fn tbt_spans_and_every_non_root_points_out() {
        let spec = BiDegreeSpec { n: 800, iota_in: 3.8, iota_out: 2.0, rng_seed: 3 };
        let (din, dout) = sample_bidegree(&spec).unwrap();
        let (g, _) = build_tbt(&din, &dout, 11).unwrap();
        // connected skeleton: undirected reachability from the root spans all
        let ball = g.bfs_ball(NodeId(0), usize::MAX);
        assert_eq!(ball.len(), g.node_count());
        for v in 1..g.node_count() {
            assert!(g.out_degree(NodeId(v)) >= 1, "node {v} lost its parent edge");
        }
    }

    /// Stub-count oracle: realized degrees equal requested ones except for
    /// reported perturbations.
    #[test]
    fn tbt_preserves_degree_sums_up_to_report() {
        let spec = BiDegreeSpec { n: 300, iota_in: 2.2, iota_out: 2.2, rng_seed: 5 };
        let (din, dout) = sample_bidegree(&spec).unwrap();
        let total: usize = din.iter().sum();
        let (g, rep) = build_tbt(&din, &dout, 13).unwrap();
        assert_eq!(g.edge_count() + rep.dropped_stubs, total + rep.forced_tree_edges);
    }

    #[test]
    fn seed_single_component_no_cross_equals_tbt() {
        let comp = BiDegreeSpec { n: 50, iota_in: 2.5, iota_out: 2.5, rng_seed: 21 };
        let seed = build_seed(&SeedSpec { components: vec![comp.clone()], cross_edges: 0 }, 0).unwrap();
        let (din, dout) = sample_bidegree(&comp).unwrap();
        let (tbt, _) = build_tbt(&din, &dout, comp.rng_seed ^ 0x7b7_1e55).unwrap();
        assert_eq!(seed.graph.edges(), tbt.edges());
    }

    #[test]
    fn seed_three_components_cross_edge_count_exact() {
        let comps: Vec<BiDegreeSpec> = [(3.8, 2.0), (2.5, 2.5), (3.0, 4.5)]
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| BiDegreeSpec { n: 800, iota_in: a, iota_out: b, rng_seed: i as u64 })
            .collect();
        let seed = build_seed(&SeedSpec { components: comps, cross_edges: 100 }, 42).unwrap();
        assert_eq!(seed.graph.node_count(), 2400);
        let cross = seed
            .graph
            .edges()
            .iter()
            .filter(|(s, d)| seed.component_of[s.0] != seed.component_of[d.0])
            .count();
        assert_eq!(cross, 100);
    }

    #[test]
    fn seed_two_components_one_cross_edge() {
        let mk = |s| BiDegreeSpec { n: 30, iota_in: 3.0, iota_out: 3.0, rng_seed: s };
        let seed = build_seed(&SeedSpec { components: vec![mk(1), mk(2)], cross_edges: 1 }, 9).unwrap();
        let cross = seed
            .graph
            .edges()
            .iter()
            .filter(|(s, d)| seed.component_of[s.0] != seed.component_of[d.0])
            .count();
        assert_eq!(cross, 1);
    }

    #[test]
    fn seed_edge_count_is_sum_of_parts() {
        let mk = |s| BiDegreeSpec { n: 40, iota_in: 2.8, iota_out: 2.8, rng_seed: s };
        let spec = SeedSpec { components: vec![mk(4), mk(5), mk(6)], cross_edges: 7 };
        let seed = build_seed(&spec, 17).unwrap();
        let mut part_edges = 0;
        for comp in &spec.components {
            let (din, dout) = sample_bidegree(comp).unwrap();
            let (tbt, _) = build_tbt(&din, &dout, comp.rng_seed ^ 0x7b7_1e55).unwrap();
            part_edges += tbt.edge_count();
        }
        assert_eq!(seed.graph.edge_count(), part_edges + 7);
    }
}
